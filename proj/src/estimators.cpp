// SPDX-License-Identifier: Apache-2.0

#include "vdfap/estimators.hpp"

#include "vdfap/distribution.hpp"
#include "vdfap/rng.hpp"

#include <json.hpp>

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace vdfap {

namespace {

// ---------------------------------------------------------------------------
// kd-tree for 1- and 2-dimensional k-NN queries
// ---------------------------------------------------------------------------

class KdTree {
public:
    KdTree(const double* points, std::int64_t n, int dim)
        : points_(points), n_(n), dim_(dim), order_(static_cast<std::size_t>(n))
    {
        std::iota(order_.begin(), order_.end(), std::int64_t{0});
        build(0, n_, 0);
    }

    // Squared distance to the k-th nearest neighbor of points_[query], the
    // query point itself excluded.
    double knn_sq_distance(std::int64_t query, int k) const
    {
        Heap heap(k);
        search(0, n_, 0, query, heap);
        return heap.worst();
    }

private:
    // Fixed-size max-heap over squared distances.
    struct Heap {
        explicit Heap(int k) : cap(k) { d.assign(static_cast<std::size_t>(k), 1e300); }
        void offer(double v)
        {
            if (v >= d[0])
                return;
            d[0] = v;
            std::size_t i = 0;
            const std::size_t n = d.size();
            while (true) {
                std::size_t largest = i;
                const std::size_t l = 2 * i + 1, r = 2 * i + 2;
                if (l < n && d[l] > d[largest])
                    largest = l;
                if (r < n && d[r] > d[largest])
                    largest = r;
                if (largest == i)
                    break;
                std::swap(d[i], d[largest]);
                i = largest;
            }
        }
        double worst() const { return d[0]; }
        int cap;
        std::vector<double> d;
    };

    double coord(std::int64_t idx, int axis) const
    {
        return points_[static_cast<std::size_t>(order_[static_cast<std::size_t>(idx)]) * dim_
                       + axis];
    }

    void build(std::int64_t lo, std::int64_t hi, int axis)
    {
        if (hi - lo <= kLeafSize)
            return;
        const std::int64_t mid = lo + (hi - lo) / 2;
        const double* pts = points_;
        const int d = dim_;
        std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                         [pts, d, axis](std::int64_t a, std::int64_t b) {
                             return pts[static_cast<std::size_t>(a) * d + axis]
                                 < pts[static_cast<std::size_t>(b) * d + axis];
                         });
        build(lo, mid, (axis + 1) % dim_);
        build(mid + 1, hi, (axis + 1) % dim_);
    }

    void search(std::int64_t lo, std::int64_t hi, int axis, std::int64_t query,
                Heap& heap) const
    {
        const double* q = points_ + static_cast<std::size_t>(query) * dim_;
        if (hi - lo <= kLeafSize) {
            for (std::int64_t i = lo; i < hi; ++i) {
                const std::int64_t idx = order_[static_cast<std::size_t>(i)];
                if (idx == query)
                    continue;
                const double* p = points_ + static_cast<std::size_t>(idx) * dim_;
                double sq = 0.0;
                for (int jj = 0; jj < dim_; ++jj) {
                    const double diff = p[jj] - q[jj];
                    sq += diff * diff;
                }
                heap.offer(sq);
            }
            return;
        }
        const std::int64_t mid = lo + (hi - lo) / 2;
        const std::int64_t split_idx = order_[static_cast<std::size_t>(mid)];
        if (split_idx != query) {
            const double* p = points_ + static_cast<std::size_t>(split_idx) * dim_;
            double sq = 0.0;
            for (int jj = 0; jj < dim_; ++jj) {
                const double diff = p[jj] - q[jj];
                sq += diff * diff;
            }
            heap.offer(sq);
        }
        const double split = coord(mid, axis);
        const double delta = q[axis] - split;
        const int next_axis = (axis + 1) % dim_;
        if (delta < 0.0) {
            search(lo, mid, next_axis, query, heap);
            if (delta * delta < heap.worst())
                search(mid + 1, hi, next_axis, query, heap);
        } else {
            search(mid + 1, hi, next_axis, query, heap);
            if (delta * delta < heap.worst())
                search(lo, mid, next_axis, query, heap);
        }
    }

    static constexpr std::int64_t kLeafSize = 16;

    const double* points_;
    std::int64_t n_;
    int dim_;
    std::vector<std::int64_t> order_;
};

double digamma(double x)
{
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv
        - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
    return result;
}

// Fixed block partition; body receives (block_index, lo, hi) so reductions
// can be accumulated per block and combined in index order, keeping results
// independent of thread scheduling.
inline constexpr int kMaxBlocks = 64;

int parallel_blocks(std::int64_t n)
{
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0)
        workers = 1;
    if (n < 4096 || workers <= 1)
        return 1;
    return static_cast<int>(std::min<unsigned>(workers, kMaxBlocks));
}

void parallel_for(std::int64_t n,
                  const std::function<void(int, std::int64_t, std::int64_t)>& body)
{
    const int blocks = parallel_blocks(n);
    if (blocks == 1) {
        body(0, 0, n);
        return;
    }
    const std::int64_t block = (n + blocks - 1) / blocks;
    std::vector<std::thread> pool;
    for (int w = 0; w < blocks; ++w) {
        const std::int64_t lo = static_cast<std::int64_t>(w) * block;
        const std::int64_t hi = std::min<std::int64_t>(n, lo + block);
        if (lo >= hi)
            break;
        pool.emplace_back(body, w, lo, hi);
    }
    for (auto& t : pool)
        t.join();
}

// Linear convolution of two tabulated pdfs via zero-padded FFT. values are
// length m^dim (dim in {1,2}); returns the convolution restricted to the
// original grid, scaled by the cell volume.
std::vector<double> fft_convolve(const std::vector<double>& f1, const std::vector<double>& f2,
                                 int m, int dim, double cell_volume)
{
    const int padded = 2 * m;
    const std::int64_t total = dim == 1 ? padded : static_cast<std::int64_t>(padded) * padded;

    auto alloc = [total]() {
        return static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
    };
    fftw_complex* a = alloc();
    fftw_complex* b = alloc();
    if (a == nullptr || b == nullptr)
        throw std::bad_alloc();

    auto fill = [&](fftw_complex* dst, const std::vector<double>& src) {
        std::fill(&dst[0][0], &dst[0][0] + 2 * total, 0.0);
        if (dim == 1) {
            for (int i = 0; i < m; ++i)
                dst[i][0] = src[static_cast<std::size_t>(i)];
        } else {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    dst[static_cast<std::int64_t>(i) * padded + j][0] =
                        src[static_cast<std::size_t>(i) * m + j];
        }
    };
    fill(a, f1);
    fill(b, f2);

    fftw_plan fa = dim == 1 ? fftw_plan_dft_1d(padded, a, a, FFTW_FORWARD, FFTW_ESTIMATE)
                            : fftw_plan_dft_2d(padded, padded, a, a, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan fb = dim == 1 ? fftw_plan_dft_1d(padded, b, b, FFTW_FORWARD, FFTW_ESTIMATE)
                            : fftw_plan_dft_2d(padded, padded, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(fa);
    fftw_execute(fb);
    for (std::int64_t i = 0; i < total; ++i) {
        const double re = a[i][0] * b[i][0] - a[i][1] * b[i][1];
        const double im = a[i][0] * b[i][1] + a[i][1] * b[i][0];
        a[i][0] = re;
        a[i][1] = im;
    }
    fftw_plan inv = dim == 1 ? fftw_plan_dft_1d(padded, a, a, FFTW_BACKWARD, FFTW_ESTIMATE)
                             : fftw_plan_dft_2d(padded, padded, a, a, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(inv);
    fftw_destroy_plan(fa);
    fftw_destroy_plan(fb);
    fftw_destroy_plan(inv);

    // Grid points x_i = -W + i dx sum to index i + j = k + m/2 for target k.
    const double norm = cell_volume / static_cast<double>(total);
    std::vector<double> out(f1.size());
    if (dim == 1) {
        for (int k = 0; k < m; ++k)
            out[static_cast<std::size_t>(k)] = a[k + m / 2][0] * norm;
    } else {
        for (int ki = 0; ki < m; ++ki)
            for (int kj = 0; kj < m; ++kj)
                out[static_cast<std::size_t>(ki) * m + kj] =
                    a[static_cast<std::int64_t>(ki + m / 2) * padded + (kj + m / 2)][0] * norm;
    }
    fftw_free(a);
    fftw_free(b);
    return out;
}

std::vector<double> tabulate_pdf(const VdfapParams& p, double half_width, int m)
{
    const double dx = 2.0 * half_width / m;
    std::vector<double> values;
    if (p.dim == 1) {
        values.resize(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const double x = -half_width + i * dx;
            values[static_cast<std::size_t>(i)] = vdfap_pdf_radial(p, std::fabs(x));
        }
    } else {
        values.resize(static_cast<std::size_t>(m) * m);
        for (int i = 0; i < m; ++i) {
            const double x = -half_width + i * dx;
            for (int j = 0; j < m; ++j) {
                const double y = -half_width + j * dx;
                values[static_cast<std::size_t>(i) * m + j] =
                    vdfap_pdf_radial(p, std::hypot(x, y));
            }
        }
    }
    return values;
}

} // namespace

std::complex<double> empirical_cf(const SampleBatch& batch, std::span<const double> omega)
{
    if (batch.count <= 0)
        throw std::invalid_argument("empirical_cf: empty batch");
    if (static_cast<int>(omega.size()) != batch.dim)
        throw std::invalid_argument("empirical_cf: frequency dimension mismatch");
    const double w0 = omega[0];
    const double w1 = batch.dim > 1 ? omega[1] : 0.0;
    const std::int64_t n = batch.count;
    const double* pos = batch.positions.data();
    const int dim = batch.dim;

    std::vector<double> partial_re(kMaxBlocks, 0.0), partial_im(kMaxBlocks, 0.0);
    parallel_for(n, [&](int block, std::int64_t lo, std::int64_t hi) {
        double re = 0.0, im = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            const double* row = pos + static_cast<std::size_t>(i) * dim;
            const double phase = w0 * row[0] + (dim > 1 ? w1 * row[1] : 0.0);
            re += std::cos(phase);
            im += std::sin(phase);
        }
        partial_re[static_cast<std::size_t>(block)] = re;
        partial_im[static_cast<std::size_t>(block)] = im;
    });
    double re = 0.0, im = 0.0;
    for (int s = 0; s < kMaxBlocks; ++s) {
        re += partial_re[static_cast<std::size_t>(s)];
        im += partial_im[static_cast<std::size_t>(s)];
    }
    return {re / static_cast<double>(n), im / static_cast<double>(n)};
}

EntropyEstimate knn_entropy(const SampleBatch& batch, int k)
{
    const std::int64_t n = batch.count;
    if (n < 100)
        throw std::invalid_argument("knn_entropy: need at least 100 samples");
    if (k < 1 || k >= n)
        throw std::invalid_argument("knn_entropy: require 1 <= k < n");
    const int dim = batch.dim;

    KdTree tree(batch.positions.data(), n, dim);
    std::vector<double> xi(static_cast<std::size_t>(n));
    std::atomic<bool> degenerate{false};
    parallel_for(n, [&](int, std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            const double sq = tree.knn_sq_distance(i, k);
            if (sq <= 0.0) {
                degenerate.store(true);
                return;
            }
            // dim * log(eps_i) = dim/2 * log(eps_i^2)
            xi[static_cast<std::size_t>(i)] = 0.5 * dim * std::log(sq);
        }
    });
    if (degenerate.load())
        throw std::domain_error(
            "knn_entropy: coincident samples; jitter the data before estimating");

    const double log_unit_ball = dim == 1 ? std::log(2.0) : std::log(3.14159265358979323846);
    const double nd = static_cast<double>(n);
    double mean_xi = 0.0;
    for (double v : xi)
        mean_xi += v;
    mean_xi /= nd;
    double var_xi = 0.0;
    for (double v : xi) {
        const double d = v - mean_xi;
        var_xi += d * d;
    }

    EntropyEstimate est;
    est.value = digamma(nd) - digamma(static_cast<double>(k)) + log_unit_ball + mean_xi;
    // Delete-one jackknife of the mean functional over the xi contributions.
    est.std_error = std::sqrt(var_xi / (nd * (nd - 1.0)));
    est.k = k;
    est.n = n;
    return est;
}

EntropyEstimate estimate_mi_vdfap_input(double u, double lambda, double lambda_in,
                                        std::int64_t n, int k, std::uint64_t seed)
{
    const VdfapParams noise(2, u, lambda);
    const VdfapParams input(2, u, lambda_in);
    const SampleBatch x = sample_exact(input, rng::splitmix64(seed ^ 0x584a0a1cad0c8183ULL), n);
    const SampleBatch nv = sample_exact(noise, rng::splitmix64(seed ^ 0x20c5e1b35f4f1c11ULL), n);

    SampleBatch y;
    y.dim = 2;
    y.count = n;
    y.seed = seed;
    y.method = SampleMethod::ExactMixture;
    y.u = u;
    y.lambda = lambda + lambda_in;
    y.positions.resize(static_cast<std::size_t>(n) * 2);
    for (std::size_t i = 0; i < y.positions.size(); ++i)
        y.positions[i] = x.positions[i] + nv.positions[i];

    EntropyEstimate est = knn_entropy(y, k);
    est.value -= differential_entropy(noise); // h(N) is exact
    return est;
}

double grid_convolution_check(const VdfapParams& p1, const VdfapParams& p2, double half_width,
                              int resolution)
{
    if (resolution < 64)
        throw std::invalid_argument("grid_convolution_check: resolution must be >= 64");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw std::invalid_argument("grid_convolution_check: half_width must be positive");
    const VdfapParams sum = stable_sum(p1, p2); // also enforces shared (d, u)
    const double sigma_component = std::sqrt(sum.lambda / sum.drift_mag());
    if (2.0 * half_width < 8.0 * sigma_component)
        throw std::invalid_argument(
            "grid_convolution_check: grid must cover 8 standard deviations of the sum");

    const int m = resolution;
    const double dx = 2.0 * half_width / m;
    const double cell = p1.dim == 1 ? dx : dx * dx;
    const std::vector<double> f1 = tabulate_pdf(p1, half_width, m);
    const std::vector<double> f2 = tabulate_pdf(p2, half_width, m);
    const std::vector<double> fs = tabulate_pdf(sum, half_width, m);
    const std::vector<double> conv = fft_convolve(f1, f2, m, p1.dim, cell);

    double l1 = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i)
        l1 += std::fabs(conv[i] - fs[i]);
    return l1 * cell;
}

KsResult two_sample_ks(std::vector<double> a, std::vector<double> b, double alpha)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("two_sample_ks: empty sample");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("two_sample_ks: alpha must lie in (0,1)");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
            ++i;
        while (j < b.size() && b[j] <= x)
            ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult res;
    res.statistic = d;
    res.alpha = alpha;
    res.threshold = std::sqrt(-0.5 * std::log(alpha / 2.0)) * std::sqrt((na + nb) / (na * nb));
    res.pass = d <= res.threshold;
    return res;
}

std::vector<double> row_norms(const SampleBatch& batch)
{
    std::vector<double> out(static_cast<std::size_t>(batch.count));
    for (std::int64_t i = 0; i < batch.count; ++i) {
        const double x = batch.at(i, 0);
        const double y = batch.dim > 1 ? batch.at(i, 1) : 0.0;
        out[static_cast<std::size_t>(i)] = std::hypot(x, y);
    }
    return out;
}

std::string check_record_json(const std::string& test, double statistic, double threshold,
                              bool pass)
{
    nlohmann::ordered_json rec;
    rec["test"] = test;
    rec["statistic"] = statistic;
    rec["threshold"] = threshold;
    rec["pass"] = pass;
    return rec.dump();
}

} // namespace vdfap
