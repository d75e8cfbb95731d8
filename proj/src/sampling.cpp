// SPDX-License-Identifier: Apache-2.0

#include "vdfap/sampling.hpp"

#include "vdfap/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace vdfap {

namespace {

void fill_chunk_exact(const VdfapParams& p, std::uint64_t seed, std::int64_t first,
                      std::int64_t last, std::uint64_t chunk_index, double* out)
{
    rng::Stream stream = rng::Stream::for_chunk(seed, chunk_index);
    const double mu = p.lambda / p.drift_mag();
    const double shape = p.lambda * p.lambda;
    for (std::int64_t i = first; i < last; ++i) {
        const double t = sample_inverse_gaussian(mu, shape, stream);
        const double scale = std::sqrt(t);
        double* row = out + static_cast<std::size_t>(i) * p.dim;
        for (int j = 0; j < p.dim; ++j)
            row[j] = scale * stream.normal();
    }
}

void run_chunked(std::int64_t count, const std::function<void(std::int64_t, std::int64_t,
                                                              std::uint64_t)>& work)
{
    const std::int64_t chunks = (count + rng::kChunkSize - 1) / rng::kChunkSize;
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0)
        workers = 1;
    if (chunks < static_cast<std::int64_t>(workers))
        workers = static_cast<unsigned>(chunks);
    if (workers <= 1) {
        for (std::int64_t c = 0; c < chunks; ++c)
            work(c * rng::kChunkSize, std::min(count, (c + 1) * rng::kChunkSize),
                 static_cast<std::uint64_t>(c));
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::int64_t c = w; c < chunks; c += workers)
                work(c * rng::kChunkSize, std::min(count, (c + 1) * rng::kChunkSize),
                     static_cast<std::uint64_t>(c));
        });
    }
    for (auto& t : pool)
        t.join();
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

const char* to_string(SampleMethod m)
{
    return m == SampleMethod::ExactMixture ? "ExactMixture" : "EulerMaruyama";
}

SampleMethod sample_method_from_string(const std::string& name)
{
    if (name == "ExactMixture")
        return SampleMethod::ExactMixture;
    if (name == "EulerMaruyama")
        return SampleMethod::EulerMaruyama;
    throw std::invalid_argument("unknown sample method: " + name);
}

double sample_inverse_gaussian(double mean, double shape, rng::Stream& stream)
{
    const double z = stream.normal();
    const double y = z * z;
    const double x = mean + mean * mean * y / (2.0 * shape)
        - mean / (2.0 * shape) * std::sqrt(4.0 * mean * shape * y + mean * mean * y * y);
    const double pick = stream.uniform();
    return pick <= mean / (mean + x) ? x : mean * mean / x;
}

SampleBatch sample_exact(const VdfapParams& p, std::uint64_t seed, std::int64_t count)
{
    if (count < 1)
        throw std::invalid_argument("sample_exact: count must be >= 1");
    SampleBatch batch;
    batch.dim = p.dim;
    batch.count = count;
    batch.seed = seed;
    batch.method = SampleMethod::ExactMixture;
    batch.u = p.u;
    batch.lambda = p.lambda;
    batch.positions.resize(static_cast<std::size_t>(count) * p.dim);
    double* out = batch.positions.data();
    run_chunked(count, [&](std::int64_t first, std::int64_t last, std::uint64_t chunk) {
        fill_chunk_exact(p, seed, first, last, chunk, out);
    });
    return batch;
}

std::string sidecar_path(const std::string& csv_path)
{
    std::filesystem::path p(csv_path);
    p.replace_extension(".json");
    return p.string();
}

void save_batch_csv(const SampleBatch& batch, const std::string& csv_path)
{
    std::ostringstream csv;
    csv << (batch.dim == 1 ? "x1" : "x1,x2") << '\n';
    for (std::int64_t i = 0; i < batch.count; ++i) {
        csv << format_double(batch.at(i, 0));
        if (batch.dim == 2)
            csv << ',' << format_double(batch.at(i, 1));
        csv << '\n';
    }

    nlohmann::ordered_json meta;
    meta["d"] = batch.dim;
    meta["u"] = batch.u;
    meta["lambda"] = batch.lambda;
    meta["seed"] = batch.seed;
    meta["count"] = batch.count;
    meta["method"] = to_string(batch.method);
    if (batch.method == SampleMethod::EulerMaruyama)
        meta["discarded"] = batch.discarded;

    std::ofstream csv_out(csv_path, std::ios::binary | std::ios::trunc);
    if (!csv_out)
        throw std::runtime_error("cannot open " + csv_path + " for writing");
    csv_out << csv.str();
    if (!csv_out.flush())
        throw std::runtime_error("write failed: " + csv_path);

    const std::string meta_path = sidecar_path(csv_path);
    std::ofstream meta_out(meta_path, std::ios::binary | std::ios::trunc);
    if (!meta_out)
        throw std::runtime_error("cannot open " + meta_path + " for writing");
    meta_out << meta.dump(2) << '\n';
    if (!meta_out.flush())
        throw std::runtime_error("write failed: " + meta_path);
}

SampleBatch load_batch_csv(const std::string& csv_path)
{
    std::ifstream meta_in(sidecar_path(csv_path));
    if (!meta_in)
        throw std::runtime_error("cannot open sidecar for " + csv_path);
    nlohmann::json meta = nlohmann::json::parse(meta_in);

    SampleBatch batch;
    batch.dim = meta.at("d").get<int>();
    batch.count = meta.at("count").get<std::int64_t>();
    batch.u = meta.at("u").get<double>();
    batch.lambda = meta.at("lambda").get<double>();
    batch.seed = meta.at("seed").get<std::uint64_t>();
    batch.method = sample_method_from_string(meta.at("method").get<std::string>());
    batch.discarded = meta.value("discarded", std::int64_t{0});

    std::ifstream csv_in(csv_path);
    if (!csv_in)
        throw std::runtime_error("cannot open " + csv_path);
    std::string line;
    if (!std::getline(csv_in, line))
        throw std::runtime_error("empty sample file: " + csv_path);
    const std::string expected_header = batch.dim == 1 ? "x1" : "x1,x2";
    if (line != expected_header)
        throw std::runtime_error("unexpected CSV header in " + csv_path);
    batch.positions.reserve(static_cast<std::size_t>(batch.count) * batch.dim);
    while (std::getline(csv_in, line)) {
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string cell;
        for (int j = 0; j < batch.dim; ++j) {
            if (!std::getline(row, cell, ','))
                throw std::runtime_error("short CSV row in " + csv_path);
            batch.positions.push_back(std::stod(cell));
        }
    }
    if (static_cast<std::int64_t>(batch.positions.size()) != batch.count * batch.dim)
        throw std::runtime_error("row count does not match sidecar count in " + csv_path);
    return batch;
}

} // namespace vdfap
