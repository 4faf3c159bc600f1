// pdet: operator CLI around the periodic-source detection library.
// Machine-readable JSON goes to stdout; everything human goes to stderr.
// Exit codes: 0 ok, 1 runtime failure, 2 usage error.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pdet/datagen.hpp"
#include "pdet/detectors.hpp"
#include "pdet/errors.hpp"
#include "pdet/eval.hpp"
#include "pdet/metrics.hpp"
#include "pdet/nn/checkpoint.hpp"
#include "pdet/nn/unet.hpp"
#include "pdet/signal_ops.hpp"
#include "pdet/spectral.hpp"
#include "pdet/train.hpp"

using ojson = nlohmann::ordered_json;

namespace {

struct BandArg {
    double lo = 0.0, hi = 0.0;
};

BandArg parse_band_str(const std::string& s) {
    const auto pos = s.find(':');
    if (pos == std::string::npos || pos == 0 || pos + 1 >= s.size())
        throw std::invalid_argument("band format is LO:HI (e.g. 0.5:4)");
    const std::string lo_s = s.substr(0, pos), hi_s = s.substr(pos + 1);
    char* end = nullptr;
    const double lo = std::strtod(lo_s.c_str(), &end);
    if (end != lo_s.c_str() + lo_s.size())
        throw std::invalid_argument("band: cannot parse '" + lo_s + "'");
    const double hi = std::strtod(hi_s.c_str(), &end);
    if (end != hi_s.c_str() + hi_s.size())
        throw std::invalid_argument("band: cannot parse '" + hi_s + "'");
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("band: values must be finite");
    if (lo < 0.0) throw std::invalid_argument("band: lo must be >= 0");
    if (!(lo < hi)) throw std::invalid_argument("band: lo must be < hi");
    return {lo, hi};
}

const CLI::Validator kBandCheck(
    [](std::string& s) -> std::string {
        try {
            (void)parse_band_str(s);
        } catch (const std::exception& e) {
            return std::string(e.what());
        }
        return {};
    },
    "LO:HI");

const CLI::Validator kPow2Check(
    [](std::string& s) -> std::string {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
        if (end != s.c_str() + s.size() || v < 2 || (v & (v - 1)) != 0)
            return "must be a power of two >= 2";
        return {};
    },
    "POW2");

// Band / transform-length / unit bundles for the common physiological tasks.
struct Preset {
    double lo, hi;
    std::size_t nfft;
    std::string unit;
};

const std::map<std::string, Preset> kPresets = {
    {"hr-ppg", {30.0 / 60.0, 210.0 / 60.0, 512, "bpm"}},
    {"hr-ecg", {30.0 / 60.0, 210.0 / 60.0, 2048, "bpm"}},
    {"resp", {5.0 / 60.0, 40.0 / 60.0, 512, "rpm"}},
    {"steps", {40.0 / 60.0, 140.0 / 60.0, 512, "spm"}},
};

std::uint64_t random_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
}

double elapsed_sec(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void emit(const ojson& report) {
    std::fputs(report.dump(2).c_str(), stdout);
    std::fputc('\n', stdout);
}

std::size_t next_pow2_at_least(std::size_t floor_nfft, std::size_t len) {
    std::size_t n = floor_nfft;
    while (n < len) n <<= 1;
    return n;
}

std::size_t eval_threads() {
    std::size_t n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("PDET_THREADS")) {
        char* end = nullptr;
        const unsigned long long cap = std::strtoull(env, &end, 10);
        if (end != env && cap > 0) n = std::min<std::size_t>(n, cap);
    }
    return n;
}

ojson band_json(const pdet::FrequencyBand& b) {
    return ojson{{"lo_hz", b.lo}, {"hi_hz", b.hi}};
}

// ---------------------------------------------------------------- synth ----

struct SynthOpts {
    std::string out;
    std::size_t n = 256;
    double fs = 25.0;
    double win_sec = 8.0;
    std::string band = "0.5:4";
    std::string f0 = "0.8:2";
    double width_frac = 0.15;
    double interferer_ratio = 2.0;
    double min_sep = 0.3;
    double noise_sigma = 0.5;
    std::size_t model_len = 256;
    bool no_zscore = false;
    std::uint64_t seed = 0;
};

int run_synth(const SynthOpts& o, bool seed_given) {
    const auto t0 = std::chrono::steady_clock::now();
    const BandArg band = parse_band_str(o.band);
    const BandArg f0 = parse_band_str(o.f0);

    pdet::SyntheticConfig cfg;
    cfg.fs = o.fs;
    cfg.win_sec = o.win_sec;
    cfg.band = pdet::FrequencyBand(band.lo, band.hi);
    cfg.f0_lo = f0.lo;
    cfg.f0_hi = f0.hi;
    cfg.width_frac = o.width_frac;
    cfg.interferer_amp_ratio = o.interferer_ratio;
    cfg.min_separation_hz = o.min_sep;
    cfg.noise_sigma = o.noise_sigma;
    cfg.n_samples = o.n;
    cfg.seed = seed_given ? o.seed : random_seed();
    cfg.model_len = o.model_len;
    cfg.zscore = !o.no_zscore;
    try {
        cfg.validate();
    } catch (const pdet::Error& e) {
        throw CLI::ValidationError(std::string(e.what()));
    }

    std::fprintf(stderr, "generating %zu windows (seed %" PRIu64 ")...\n", o.n, cfg.seed);
    pdet::LabeledDataset ds = pdet::gen_dataset(cfg);
    pdet::save_dataset(ds, o.out);

    ojson report;
    report["command"] = "synth";
    report["config"] = {
        {"fs", cfg.fs},
        {"win_sec", cfg.win_sec},
        {"band", band_json(cfg.band)},
        {"f0_lo", cfg.f0_lo},
        {"f0_hi", cfg.f0_hi},
        {"width_frac", cfg.width_frac},
        {"interferer_amp_ratio", cfg.interferer_amp_ratio},
        {"min_separation_hz", cfg.min_separation_hz},
        {"noise_sigma", cfg.noise_sigma},
        {"n", cfg.n_samples},
        {"model_len", cfg.model_len},
        {"zscore", cfg.zscore},
    };
    report["out"] = o.out;
    report["count"] = ds.size();
    report["raw_win_len"] = cfg.raw_len();
    report["wall_time_sec"] = elapsed_sec(t0);
    report["seed"] = cfg.seed;
    emit(report);
    return 0;
}

// ---------------------------------------------------------------- train ----

struct TrainOpts {
    std::string data;
    std::string out;
    double lr = 1e-3;
    std::size_t batch = 64;
    std::size_t epochs = 100;
    double lambda = 1.0;
    double nu = 1.0;
    double bw = 1.0;
    std::size_t base_channels = 32;
    std::uint64_t seed = 0;
    std::size_t patience = 15;
    double min_lr = 1e-5;
    double halving = 0.5;
    std::size_t nfft = 0; // 0 = auto
    std::string band;     // empty = dataset band
    std::string history;  // empty = <out>.history.csv
};

int run_train(const TrainOpts& o, bool seed_given, bool nfft_given) {
    const auto t0 = std::chrono::steady_clock::now();
    pdet::LabeledDataset ds = pdet::load_dataset(o.data);
    if (ds.windows.empty())
        pdet::fail(pdet::ErrorCode::BadConfig, "train: dataset is empty");
    const std::size_t win_len = ds.windows.front().size();

    pdet::FrequencyBand band = ds.band;
    if (!o.band.empty()) {
        const BandArg b = parse_band_str(o.band);
        band = pdet::FrequencyBand(b.lo, b.hi);
    }
    const std::size_t nfft =
        nfft_given ? o.nfft : next_pow2_at_least(512, win_len);

    pdet::nn::UNetConfig mcfg;
    mcfg.base_channels = o.base_channels;
    mcfg.validate();
    pdet::nn::UNet1D<float> model(mcfg);
    const std::uint64_t seed = seed_given ? o.seed : random_seed();
    model.init_params(seed);

    pdet::TrainConfig tc;
    tc.lr = o.lr;
    tc.batch_size = o.batch;
    tc.max_epochs = o.epochs;
    tc.patience = o.patience;
    tc.lr_halving = o.halving;
    tc.min_lr = o.min_lr;
    tc.weights = {o.lambda, o.nu, o.bw};
    tc.seed = seed;
    tc.nfft = nfft;
    tc.band = band;

    std::fprintf(stderr,
                 "training on %zu windows (len %zu, fs %g), base %zu, seed %" PRIu64 "\n",
                 ds.size(), win_len, ds.fs, o.base_channels, seed);
    pdet::TrainResult tr = pdet::train(model, ds.windows, tc);
    for (const pdet::EpochStats& st : tr.history)
        std::fprintf(stderr, "  epoch %3zu  total %.6f  (se %.4f ds %.4f bw %.4f)  lr %g\n",
                     st.epoch, st.total, st.se, st.ds, st.bw, st.lr);

    const std::string history_path =
        o.history.empty() ? o.out + ".history.csv" : o.history;
    pdet::write_history_csv(tr.history, history_path);

    pdet::nn::CheckpointInfo info;
    info.config = mcfg;
    info.pipeline.fs = ds.fs;
    info.pipeline.raw_win_len = static_cast<std::uint32_t>(win_len);
    info.pipeline.model_len = static_cast<std::uint32_t>(win_len);
    info.pipeline.zscore = true;
    info.pipeline.band = band;
    info.pipeline.nfft = static_cast<std::uint32_t>(nfft);
    info.meta.epochs = static_cast<std::uint32_t>(tr.history.size());
    info.meta.final_loss = tr.best_loss;
    info.meta.seed = seed;
    pdet::nn::save_checkpoint(model, info, o.out);

    const pdet::EpochStats& last = tr.history.back();
    ojson report;
    report["command"] = "train";
    report["config"] = {
        {"data", o.data},
        {"out", o.out},
        {"lr", o.lr},
        {"batch_size", o.batch},
        {"max_epochs", o.epochs},
        {"lambda", o.lambda},
        {"nu", o.nu},
        {"bw", o.bw},
        {"base_channels", o.base_channels},
        {"nfft", nfft},
        {"band", band_json(band)},
        {"patience", o.patience},
        {"lr_halving", o.halving},
        {"min_lr", o.min_lr},
    };
    report["n_windows"] = ds.size();
    report["param_count"] = model.param_count();
    report["epochs_run"] = tr.history.size();
    report["best_epoch"] = tr.best_epoch;
    report["best_loss"] = tr.best_loss;
    report["last_epoch"] = {{"se", last.se}, {"ds", last.ds}, {"bw", last.bw},
                            {"total", last.total}, {"lr", last.lr}};
    report["checkpoint"] = o.out;
    report["history_csv"] = history_path;
    report["wall_time_sec"] = elapsed_sec(t0);
    report["seed"] = seed;
    emit(report);
    return 0;
}

// ----------------------------------------------------- detector commands ----

// Effective band/nfft/unit after applying a preset and explicit overrides.
struct DetectorParams {
    pdet::FrequencyBand band{0.5, 4.0};
    std::size_t nfft = 512;
    pdet::RateUnit unit = pdet::RateUnit::hz;
};

DetectorParams resolve_params(const std::string& preset, const std::string& band_s,
                              bool band_given, std::size_t nfft, bool nfft_given,
                              const std::string& unit_s, bool unit_given,
                              const pdet::FrequencyBand* fallback_band,
                              std::size_t fallback_nfft) {
    DetectorParams p;
    if (fallback_band) p.band = *fallback_band;
    if (fallback_nfft) p.nfft = fallback_nfft;
    if (!preset.empty()) {
        const Preset& pre = kPresets.at(preset);
        p.band = pdet::FrequencyBand(pre.lo, pre.hi);
        p.nfft = pre.nfft;
        p.unit = pdet::parse_unit(pre.unit);
    }
    if (band_given) {
        const BandArg b = parse_band_str(band_s);
        p.band = pdet::FrequencyBand(b.lo, b.hi);
    }
    if (nfft_given) p.nfft = nfft;
    if (unit_given) p.unit = pdet::parse_unit(unit_s);
    return p;
}

// Wraps a loaded checkpoint as the window->window filter the neural detector
// needs; re-applies the persisted preprocessing (zscore, pad/crop).
struct NeuralFilter {
    std::shared_ptr<pdet::nn::UNet1D<float>> net;
    pdet::nn::PipelineDescriptor pipe;

    pdet::TimeSeries operator()(const pdet::TimeSeries& raw) const {
        pdet::TimeSeries ts = raw;
        if (ts.fs != pipe.fs) ts = pdet::resample_linear(ts, pipe.fs);
        if (pipe.zscore) ts = pdet::zscore(ts);
        ts = pdet::pad_or_crop_center(ts, pipe.model_len);
        pdet::nn::Tensor<float> x({1, 1, ts.size()});
        for (std::size_t t = 0; t < ts.size(); ++t)
            x.data[t] = static_cast<float>(ts.samples[t]);
        pdet::nn::Tensor<float> y = net->forward(x, /*train=*/false);
        pdet::TimeSeries out;
        out.fs = pipe.fs;
        out.samples.resize(ts.size());
        for (std::size_t t = 0; t < ts.size(); ++t)
            out.samples[t] = static_cast<double>(y.data[t]);
        return out;
    }
};

struct DetectOpts {
    std::string model;
    std::string input;
    double fs = 0.0; // 0 = use the checkpoint's rate
    bool has_header = false;
    std::string band;
    std::size_t nfft = 0;
    std::string unit = "hz";
    std::string preset;
};

int run_detect(const DetectOpts& o, bool band_given, bool nfft_given, bool unit_given) {
    const auto t0 = std::chrono::steady_clock::now();
    pdet::nn::CheckpointInfo info;
    auto net = std::make_shared<pdet::nn::UNet1D<float>>(
        pdet::nn::load_checkpoint(o.model, &info));

    const DetectorParams p =
        resolve_params(o.preset, o.band, band_given, o.nfft, nfft_given, o.unit,
                       unit_given, &info.pipeline.band, info.pipeline.nfft);

    const double fs_in = o.fs > 0.0 ? o.fs : info.pipeline.fs;
    pdet::TimeSeries ts = pdet::load_csv(o.input, fs_in, o.has_header);

    NeuralFilter filter{net, info.pipeline};
    pdet::DetectionResult r = pdet::detect_neural(filter, ts, p.band, p.nfft);

    ojson report;
    report["command"] = "detect";
    report["config"] = {
        {"model", o.model},
        {"input", o.input},
        {"fs", fs_in},
        {"model_fs", info.pipeline.fs},
        {"model_len", info.pipeline.model_len},
        {"base_channels", info.config.base_channels},
        {"band", band_json(p.band)},
        {"nfft", p.nfft},
        {"unit", pdet::unit_name(p.unit)},
    };
    report["freq_hz"] = r.freq_hz;
    report["rate"] = pdet::hz_to_rate(r.freq_hz, p.unit);
    report["rate_unit"] = pdet::unit_name(p.unit);
    report["confidence"] = r.confidence;
    report["method"] = r.method;
    report["wall_time_sec"] = elapsed_sec(t0);
    emit(report);
    return 0;
}

struct BaselineOpts {
    std::string input;
    double fs = 25.0;
    bool has_header = false;
    std::string method = "fourier";
    std::string band = "0.5:4";
    std::size_t nfft = 512;
    std::string unit = "hz";
    std::string preset;
};

int run_baseline(const BaselineOpts& o, bool band_given, bool nfft_given,
                 bool unit_given) {
    const auto t0 = std::chrono::steady_clock::now();
    DetectorParams p = resolve_params(o.preset, o.band, band_given, o.nfft,
                                      nfft_given, o.unit, unit_given, nullptr, 0);
    pdet::TimeSeries ts = pdet::load_csv(o.input, o.fs, o.has_header);
    if (!nfft_given && o.preset.empty())
        p.nfft = next_pow2_at_least(p.nfft, ts.size());

    pdet::DetectionResult r;
    if (o.method == "fourier") r = pdet::detect_fourier(ts, p.band, p.nfft);
    else if (o.method == "acf") r = pdet::detect_acf(ts, p.band);
    else r = pdet::detect_hybrid(ts, p.band, p.nfft);

    ojson report;
    report["command"] = "baseline";
    report["config"] = {
        {"input", o.input},
        {"fs", o.fs},
        {"method", o.method},
        {"band", band_json(p.band)},
        {"nfft", p.nfft},
        {"unit", pdet::unit_name(p.unit)},
    };
    report["freq_hz"] = r.freq_hz;
    report["rate"] = pdet::hz_to_rate(r.freq_hz, p.unit);
    report["rate_unit"] = pdet::unit_name(p.unit);
    report["confidence"] = r.confidence;
    report["method"] = r.method;
    report["wall_time_sec"] = elapsed_sec(t0);
    emit(report);
    return 0;
}

struct EvalOpts {
    std::string data;
    std::string detector = "fourier";
    std::string model;
    std::string band;
    std::size_t nfft = 0;
    std::string unit = "hz";
    std::string preset;
    std::string per_sample;
};

int run_eval(const EvalOpts& o, bool band_given, bool nfft_given, bool unit_given) {
    const auto t0 = std::chrono::steady_clock::now();
    pdet::LabeledDataset ds = pdet::load_dataset(o.data);

    pdet::nn::CheckpointInfo info;
    std::shared_ptr<pdet::nn::UNet1D<float>> net;
    if (o.detector == "neural") {
        if (o.model.empty())
            throw CLI::ValidationError("--detector neural requires --model");
        net = std::make_shared<pdet::nn::UNet1D<float>>(
            pdet::nn::load_checkpoint(o.model, &info));
    }

    const pdet::FrequencyBand* fb = net ? &info.pipeline.band : &ds.band;
    const std::size_t fallback_nfft = net ? info.pipeline.nfft : 512;
    const DetectorParams p = resolve_params(o.preset, o.band, band_given, o.nfft,
                                            nfft_given, o.unit, unit_given, fb,
                                            fallback_nfft);

    pdet::Detector det;
    if (o.detector == "fourier") {
        det = [&p](const pdet::TimeSeries& ts) {
            return pdet::detect_fourier(ts, p.band, p.nfft);
        };
    } else if (o.detector == "acf") {
        det = [&p](const pdet::TimeSeries& ts) { return pdet::detect_acf(ts, p.band); };
    } else if (o.detector == "hybrid") {
        det = [&p](const pdet::TimeSeries& ts) {
            return pdet::detect_hybrid(ts, p.band, p.nfft);
        };
    } else {
        NeuralFilter filter{net, info.pipeline};
        det = [&p, filter](const pdet::TimeSeries& ts) {
            return pdet::detect_neural(filter, ts, p.band, p.nfft);
        };
    }

    // the network's forward pass caches activations, so it cannot be shared
    // across workers; rule-based detectors are pure and fan out freely
    const std::size_t threads = net ? 1 : eval_threads();
    pdet::EvalReport rep = pdet::evaluate(det, ds, p.unit, threads);

    const std::string per_sample_path =
        o.per_sample.empty() ? o.data + "." + o.detector + ".samples.csv"
                             : o.per_sample;
    pdet::write_per_sample_csv(rep, per_sample_path);

    ojson metrics;
    metrics["mae"] = rep.metrics.mae;
    metrics["rmse"] = rep.metrics.rmse;
    if (rep.metrics.pearson_valid)
        metrics["rho_percent"] = 100.0 * rep.metrics.pearson_rho;
    else
        metrics["rho_percent"] = nullptr;
    metrics["mape_percent"] = rep.metrics.mape_percent;

    ojson report;
    report["command"] = "eval";
    report["config"] = {
        {"data", o.data},
        {"detector", o.detector},
        {"model", o.model},
        {"band", band_json(p.band)},
        {"nfft", p.nfft},
        {"unit", pdet::unit_name(p.unit)},
        {"threads", threads},
    };
    report["n"] = ds.size();
    report["excluded"] = rep.excluded;
    report["metrics"] = metrics;
    report["per_sample_csv"] = per_sample_path;
    report["wall_time_sec"] = elapsed_sec(t0);
    emit(report);
    return 0;
}

struct SpectrumOpts {
    std::string input;
    std::string out;
    double fs = 25.0;
    bool has_header = false;
    std::string band = "0.5:4";
    std::size_t nfft = 512;
    std::string preset;
};

int run_spectrum(const SpectrumOpts& o, bool band_given, bool nfft_given) {
    const auto t0 = std::chrono::steady_clock::now();
    DetectorParams p = resolve_params(o.preset, o.band, band_given, o.nfft,
                                      nfft_given, "hz", false, nullptr, 0);
    pdet::TimeSeries ts = pdet::load_csv(o.input, o.fs, o.has_header);
    if (!nfft_given && o.preset.empty())
        p.nfft = next_pow2_at_least(p.nfft, ts.size());

    pdet::PowerSpectrum spec = pdet::dft_power(ts, p.nfft);
    std::FILE* f = std::fopen(o.out.c_str(), "wb");
    if (!f) pdet::fail(pdet::ErrorCode::IoError, "cannot open for writing: " + o.out);
    std::fprintf(f, "freq_hz,power\n");
    for (std::size_t k = 0; k < spec.bins(); ++k)
        std::fprintf(f, "%.17g,%.17g\n", spec.bin_hz(k), spec.power[k]);
    if (std::fclose(f) != 0) pdet::fail(pdet::ErrorCode::IoError, "write failed: " + o.out);

    pdet::DetectionResult peak = pdet::detect_fourier(ts, p.band, p.nfft);
    const double oob = pdet::out_of_band_power(spec, p.band);

    ojson report;
    report["command"] = "spectrum";
    report["config"] = {
        {"input", o.input},
        {"fs", o.fs},
        {"band", band_json(p.band)},
        {"nfft", p.nfft},
    };
    report["out"] = o.out;
    report["bins"] = spec.bins();
    report["bin_hz"] = ts.fs / static_cast<double>(p.nfft);
    report["peak_freq_hz"] = peak.freq_hz;
    report["peak_confidence"] = peak.confidence;
    report["out_of_band_fraction"] = oob;
    report["wall_time_sec"] = elapsed_sec(t0);
    emit(report);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pdet — periodic-source detection in noisy multi-periodic time series"};
    app.require_subcommand(1);

    int rc = 0;

    // synth
    SynthOpts so;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic labeled dataset (PDTS)");
    synth->add_option("--out", so.out, "Output dataset path")->required();
    synth->add_option("--n", so.n, "Number of windows")->check(CLI::PositiveNumber);
    synth->add_option("--fs", so.fs, "Sample rate, Hz")->check(CLI::PositiveNumber);
    synth->add_option("--win-sec", so.win_sec, "Window length, seconds")->check(CLI::PositiveNumber);
    synth->add_option("--band", so.band, "Band of interest LO:HI, Hz")->check(kBandCheck);
    synth->add_option("--f0", so.f0, "Target fundamental range LO:HI, Hz")->check(kBandCheck);
    synth->add_option("--width-frac", so.width_frac, "Pulse sigma / period");
    synth->add_option("--interferer-ratio", so.interferer_ratio,
                      "Interferer amplitude vs unit pulse peak");
    synth->add_option("--min-separation", so.min_sep, "Min |f_i - f0|, Hz");
    synth->add_option("--noise-sigma", so.noise_sigma, "White noise sigma");
    synth->add_option("--model-len", so.model_len, "Padded window length (multiple of 8)");
    synth->add_flag("--no-zscore", so.no_zscore, "Skip per-window z-scoring");
    synth->add_option("--seed", so.seed, "RNG seed (omitted: random, printed)");
    synth->callback([&] { rc = run_synth(so, synth->count("--seed") > 0); });

    // train
    TrainOpts to;
    CLI::App* train = app.add_subcommand("train", "Train the detector network on a PDTS dataset");
    train->add_option("--data", to.data, "Training dataset (PDTS)")->required();
    train->add_option("--out", to.out, "Checkpoint output path")->required();
    train->add_option("--lr", to.lr, "Learning rate")->check(CLI::PositiveNumber);
    train->add_option("--batch", to.batch, "Batch size")->check(CLI::PositiveNumber);
    train->add_option("--epochs", to.epochs, "Max epochs")->check(CLI::PositiveNumber);
    train->add_option("--lambda", to.lambda, "Spectral-entropy weight");
    train->add_option("--nu", to.nu, "Spectral-KL weight");
    train->add_option("--bw", to.bw, "Out-of-band weight");
    train->add_option("--base-channels", to.base_channels, "U-Net width")->check(CLI::PositiveNumber);
    train->add_option("--seed", to.seed, "RNG seed (omitted: random, printed)");
    train->add_option("--patience", to.patience, "Epochs without a new best before halving lr")
        ->check(CLI::PositiveNumber);
    train->add_option("--min-lr", to.min_lr, "Stop once halving reaches this rate")
        ->check(CLI::PositiveNumber);
    train->add_option("--lr-halving", to.halving, "LR multiplier on plateau");
    train->add_option("--nfft", to.nfft, "Loss transform length (default: >= window length)")
        ->check(kPow2Check);
    train->add_option("--band", to.band, "Band override LO:HI, Hz (default: dataset band)")
        ->check(kBandCheck);
    train->add_option("--history", to.history, "History CSV path (default: <out>.history.csv)");
    train->callback([&] {
        rc = run_train(to, train->count("--seed") > 0, train->count("--nfft") > 0);
    });

    const std::vector<std::string> units = {"hz", "bpm", "rpm", "spm"};
    const std::vector<std::string> preset_names = {"hr-ppg", "hr-ecg", "resp", "steps"};

    // detect
    DetectOpts dopt;
    CLI::App* detect = app.add_subcommand("detect", "Neural detection on a CSV window");
    detect->add_option("--model", dopt.model, "Checkpoint path")->required();
    detect->add_option("--input", dopt.input, "CSV input (one value per row, or t,v rows)")
        ->required();
    detect->add_option("--fs", dopt.fs, "Input sample rate, Hz (default: model's rate)")
        ->check(CLI::PositiveNumber);
    detect->add_flag("--has-header", dopt.has_header, "Skip the first CSV row");
    detect->add_option("--band", dopt.band, "Band override LO:HI, Hz")->check(kBandCheck);
    detect->add_option("--nfft", dopt.nfft, "Transform length override")->check(kPow2Check);
    detect->add_option("--unit", dopt.unit, "Rate unit")->check(CLI::IsMember(units));
    detect->add_option("--preset", dopt.preset, "Task preset (band+nfft+unit)")
        ->check(CLI::IsMember(preset_names));
    detect->callback([&] {
        rc = run_detect(dopt, detect->count("--band") > 0, detect->count("--nfft") > 0,
                        detect->count("--unit") > 0);
    });

    // baseline
    BaselineOpts bo;
    CLI::App* baseline = app.add_subcommand("baseline", "Rule-based detection on a CSV window");
    baseline->add_option("--input", bo.input, "CSV input")->required();
    baseline->add_option("--fs", bo.fs, "Input sample rate, Hz")->check(CLI::PositiveNumber);
    baseline->add_flag("--has-header", bo.has_header, "Skip the first CSV row");
    baseline->add_option("--method", bo.method, "Detector")
        ->check(CLI::IsMember({"fourier", "acf", "hybrid"}));
    baseline->add_option("--band", bo.band, "Band of interest LO:HI, Hz")->check(kBandCheck);
    baseline->add_option("--nfft", bo.nfft, "Transform length")->check(kPow2Check);
    baseline->add_option("--unit", bo.unit, "Rate unit")->check(CLI::IsMember(units));
    baseline->add_option("--preset", bo.preset, "Task preset (band+nfft+unit)")
        ->check(CLI::IsMember(preset_names));
    baseline->callback([&] {
        rc = run_baseline(bo, baseline->count("--band") > 0, baseline->count("--nfft") > 0,
                          baseline->count("--unit") > 0);
    });

    // eval
    EvalOpts eo;
    CLI::App* eval = app.add_subcommand("eval", "Score a detector over a labeled PDTS dataset");
    eval->add_option("--data", eo.data, "Labeled dataset (PDTS)")->required();
    eval->add_option("--detector", eo.detector, "Detector to score")
        ->check(CLI::IsMember({"fourier", "acf", "hybrid", "neural"}));
    eval->add_option("--model", eo.model, "Checkpoint (required for --detector neural)");
    eval->add_option("--band", eo.band, "Band override LO:HI, Hz")->check(kBandCheck);
    eval->add_option("--nfft", eo.nfft, "Transform length override")->check(kPow2Check);
    eval->add_option("--unit", eo.unit, "Rate unit for metrics")->check(CLI::IsMember(units));
    eval->add_option("--preset", eo.preset, "Task preset (band+nfft+unit)")
        ->check(CLI::IsMember(preset_names));
    eval->add_option("--per-sample", eo.per_sample,
                     "Per-sample CSV path (default: <data>.<detector>.samples.csv)");
    eval->callback([&] {
        rc = run_eval(eo, eval->count("--band") > 0, eval->count("--nfft") > 0,
                      eval->count("--unit") > 0);
    });

    // spectrum
    SpectrumOpts po;
    CLI::App* spectrum = app.add_subcommand("spectrum", "Write the periodogram of a CSV input");
    spectrum->add_option("--input", po.input, "CSV input")->required();
    spectrum->add_option("--out", po.out, "Output CSV path (freq_hz,power)")->required();
    spectrum->add_option("--fs", po.fs, "Input sample rate, Hz")->check(CLI::PositiveNumber);
    spectrum->add_flag("--has-header", po.has_header, "Skip the first CSV row");
    spectrum->add_option("--band", po.band, "Band of interest LO:HI, Hz")->check(kBandCheck);
    spectrum->add_option("--nfft", po.nfft, "Transform length")->check(kPow2Check);
    spectrum->add_option("--preset", po.preset, "Task preset (band+nfft)")
        ->check(CLI::IsMember(preset_names));
    spectrum->callback([&] {
        rc = run_spectrum(po, spectrum->count("--band") > 0, spectrum->count("--nfft") > 0);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        app.exit(e);
        return 2;
    } catch (const pdet::Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", pdet::error_code_name(e.code()), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return rc;
}
