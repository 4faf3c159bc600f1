#pragma once

#include <string>
#include <vector>

#include "pdet/errors.hpp"

namespace pdet {

enum class RateUnit { hz, bpm, rpm, spm };

RateUnit parse_unit(const std::string& s); // throws BadConfig on unknown names
const char* unit_name(RateUnit u);

// Hz → rate in the task unit: ×60 for the per-minute units, identity for hz.
double hz_to_rate(double freq_hz, RateUnit unit);

// Metric formulas over prediction/truth rate sequences.
double mae(const std::vector<double>& pred, const std::vector<double>& truth);
double rmse(const std::vector<double>& pred, const std::vector<double>& truth);
double pearson(const std::vector<double>& pred, const std::vector<double>& truth);
double mape(const std::vector<double>& pred, const std::vector<double>& truth); // percent

struct Metrics {
    double mae = 0.0;
    double rmse = 0.0;
    double pearson_rho = 0.0; // valid only if pearson_valid
    bool pearson_valid = false;
    double mape_percent = 0.0;
};

// All four at once; Pearson degrades to pearson_valid=false (instead of
// throwing) when either sequence is constant, so a collapsed model can still
// be scored on the other metrics.
Metrics compute_metrics(const std::vector<double>& pred, const std::vector<double>& truth);

} // namespace pdet
