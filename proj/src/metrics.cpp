#include "pdet/metrics.hpp"

#include <cmath>

namespace pdet {

RateUnit parse_unit(const std::string& s) {
    if (s == "hz") return RateUnit::hz;
    if (s == "bpm") return RateUnit::bpm;
    if (s == "rpm") return RateUnit::rpm;
    if (s == "spm") return RateUnit::spm;
    fail(ErrorCode::BadConfig, "unknown unit \"" + s + "\" (want hz|bpm|rpm|spm)");
}

const char* unit_name(RateUnit u) {
    switch (u) {
        case RateUnit::hz:  return "hz";
        case RateUnit::bpm: return "bpm";
        case RateUnit::rpm: return "rpm";
        case RateUnit::spm: return "spm";
    }
    return "?";
}

double hz_to_rate(double freq_hz, RateUnit unit) {
    if (freq_hz < 0.0)
        fail(ErrorCode::BadConfig, "hz_to_rate: negative frequency");
    return unit == RateUnit::hz ? freq_hz : 60.0 * freq_hz;
}

namespace {

void check_lengths(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || a.size() != b.size())
        fail(ErrorCode::LengthMismatch, "metrics: sequences must have equal non-zero length");
}

} // namespace

double mae(const std::vector<double>& pred, const std::vector<double>& truth) {
    check_lengths(pred, truth);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) acc += std::abs(truth[i] - pred[i]);
    return acc / static_cast<double>(pred.size());
}

double rmse(const std::vector<double>& pred, const std::vector<double>& truth) {
    check_lengths(pred, truth);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = truth[i] - pred[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(pred.size()));
}

double pearson(const std::vector<double>& pred, const std::vector<double>& truth) {
    check_lengths(pred, truth);
    const double n = static_cast<double>(pred.size());
    double mp = 0.0, mt = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        mp += pred[i];
        mt += truth[i];
    }
    mp /= n;
    mt /= n;
    double num = 0.0, dp = 0.0, dt = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double a = pred[i] - mp;
        const double b = truth[i] - mt;
        num += a * b;
        dp += a * a;
        dt += b * b;
    }
    if (!(dp > 0.0) || !(dt > 0.0))
        fail(ErrorCode::ConstantSequence, "pearson: constant sequence");
    return num / std::sqrt(dp * dt);
}

double mape(const std::vector<double>& pred, const std::vector<double>& truth) {
    check_lengths(pred, truth);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (truth[i] == 0.0)
            fail(ErrorCode::ZeroTruth, "mape: zero truth value at index " + std::to_string(i));
        acc += std::abs((truth[i] - pred[i]) / truth[i]);
    }
    return 100.0 * acc / static_cast<double>(pred.size());
}

Metrics compute_metrics(const std::vector<double>& pred, const std::vector<double>& truth) {
    Metrics m;
    m.mae = mae(pred, truth);
    m.rmse = rmse(pred, truth);
    m.mape_percent = mape(pred, truth);
    try {
        m.pearson_rho = pearson(pred, truth);
        m.pearson_valid = true;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ConstantSequence) throw;
        m.pearson_rho = 0.0;
        m.pearson_valid = false;
    }
    return m;
}

} // namespace pdet
