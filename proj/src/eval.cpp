#include "pdet/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

#include "pdet/errors.hpp"

namespace pdet {

EvalReport evaluate(const Detector& detector, const LabeledDataset& ds,
                    RateUnit unit, std::size_t n_threads) {
    if (!detector) fail(ErrorCode::BadConfig, "evaluate: null detector");
    if (!ds.has_labels || ds.labels.size() != ds.windows.size())
        fail(ErrorCode::NoLabels, "evaluate: dataset has no ground-truth labels");
    if (ds.windows.empty())
        fail(ErrorCode::NoLabels, "evaluate: empty dataset");

    const std::size_t n = ds.windows.size();
    EvalReport report;
    report.samples.resize(n);

    auto run_one = [&](std::size_t i) {
        SampleRecord& rec = report.samples[i];
        rec.index = i;
        rec.truth = hz_to_rate(ds.labels[i], unit);
        try {
            DetectionResult r = detector(ds.windows[i]);
            rec.pred = hz_to_rate(r.freq_hz, unit);
            rec.error = rec.pred - rec.truth;
            rec.ok = true;
        } catch (const Error& e) {
            rec.ok = false;
            rec.message = e.what();
        }
    };

    std::size_t workers = std::max<std::size_t>(1, n_threads);
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= n) break;
                    run_one(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    std::vector<double> truth, pred;
    truth.reserve(n);
    pred.reserve(n);
    for (const SampleRecord& rec : report.samples) {
        if (rec.ok) {
            truth.push_back(rec.truth);
            pred.push_back(rec.pred);
        } else {
            ++report.excluded;
        }
    }
    if (truth.empty())
        fail(ErrorCode::AllSamplesFailed, "evaluate: detector failed on every sample");
    report.metrics = compute_metrics(pred, truth);
    return report;
}

void write_per_sample_csv(const EvalReport& report, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) fail(ErrorCode::IoError, "cannot open for writing: " + path);
    std::fprintf(f, "index,truth,pred,error,ok\n");
    for (const SampleRecord& rec : report.samples) {
        std::fprintf(f, "%zu,%.17g,%.17g,%.17g,%d\n", rec.index, rec.truth,
                     rec.ok ? rec.pred : 0.0, rec.ok ? rec.error : 0.0,
                     rec.ok ? 1 : 0);
    }
    if (std::fclose(f) != 0) fail(ErrorCode::IoError, "write failed: " + path);
}

} // namespace pdet
