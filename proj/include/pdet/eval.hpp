#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pdet/datagen.hpp"
#include "pdet/detectors.hpp"
#include "pdet/metrics.hpp"

namespace pdet {

struct SampleRecord {
    std::size_t index = 0;
    double truth = 0.0; // in the requested unit
    double pred = 0.0;
    double error = 0.0; // pred − truth
    bool ok = false;
    std::string message; // detector error, when !ok
};

struct EvalReport {
    Metrics metrics;           // over the ok samples only
    std::vector<SampleRecord> samples;
    std::size_t excluded = 0;  // samples whose detector raised
};

using Detector = std::function<DetectionResult(const TimeSeries&)>;

// Runs the detector on every labeled window (optionally fanned out over a
// worker pool; results are index-addressed so the report is identical no
// matter the thread count), converts to the requested unit, and scores.
// Detector errors exclude the sample; if every sample fails, AllSamplesFailed.
EvalReport evaluate(const Detector& detector, const LabeledDataset& ds,
                    RateUnit unit, std::size_t n_threads = 1);

void write_per_sample_csv(const EvalReport& report, const std::string& path);

} // namespace pdet
