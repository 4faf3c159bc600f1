#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "pdet/datagen.hpp"
#include "pdet/detectors.hpp"
#include "pdet/nn/checkpoint.hpp"

using namespace pdet;
using ojson = nlohmann::ordered_json;

namespace {

struct CmdResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is.good()) return {};
    return std::string(std::istreambuf_iterator<char>(is), {});
}

CmdResult run_cli(const std::string& args, const std::string& env = "") {
    const std::string out = "tmp_cli_stdout.txt", err = "tmp_cli_stderr.txt";
    const std::string cmd =
        env + (env.empty() ? "" : " ") + PDET_CLI_PATH + " " + args + " >" + out +
        " 2>" + err;
    const int rc = std::system(cmd.c_str());
    CmdResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    std::remove(out.c_str());
    std::remove(err.c_str());
    return r;
}

void write_sine_csv(const std::string& path, double f, double fs, std::size_t n) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    REQUIRE(fp != nullptr);
    for (std::size_t t = 0; t < n; ++t)
        std::fprintf(fp, "%.17g\n", std::sin(2.0 * M_PI * f * static_cast<double>(t) / fs));
    std::fclose(fp);
}

// exact bin frequency so the periodogram argmax reproduces the label bit-for-bit
constexpr double kFs = 25.0;
const double kTone = kFs * 26.0 / 512.0; // 1.26953125 Hz

} // namespace

TEST_CASE("help and usage errors") {
    CHECK(run_cli("--help").code == 0);
    const CmdResult top = run_cli("--help");
    CHECK(top.out.find("synth") != std::string::npos);
    CHECK(top.out.find("eval") != std::string::npos);

    CHECK(run_cli("").code == 2);                       // a subcommand is required
    CHECK(run_cli("synth").code == 2);                  // --out is required
    CHECK(run_cli("frobnicate").code == 2);             // unknown subcommand
    CHECK(run_cli("baseline --input x.csv --bogus").code == 2);
    CHECK(run_cli("baseline --input x.csv --preset nope").code == 2);
    CHECK(run_cli("baseline --input x.csv --nfft 100").code == 2);

    const CmdResult bad_band = run_cli("baseline --input x.csv --band 4:0.5");
    CHECK(bad_band.code == 2);
    CHECK(bad_band.err.find("lo must be < hi") != std::string::npos);
}

TEST_CASE("runtime failures exit 1 with a tagged message") {
    const CmdResult missing = run_cli("baseline --input tmp_cli_missing.csv");
    CHECK(missing.code == 1);
    CHECK(missing.err.find("error [IoError]:") != std::string::npos);

    CHECK(run_cli("train --data tmp_cli_missing.pdts --out tmp_cli_m.pdm").code == 1);

    std::FILE* fp = std::fopen("tmp_cli_garbage.pdm", "wb");
    REQUIRE(fp != nullptr);
    std::fputs("not a checkpoint at all", fp);
    std::fclose(fp);
    write_sine_csv("tmp_cli_sine.csv", kTone, kFs, 512);
    const CmdResult bad_ckpt =
        run_cli("detect --model tmp_cli_garbage.pdm --input tmp_cli_sine.csv");
    CHECK(bad_ckpt.code == 1);
    CHECK(bad_ckpt.err.find("error [BadMagic]:") != std::string::npos);
    std::remove("tmp_cli_garbage.pdm");
    std::remove("tmp_cli_sine.csv");
}

TEST_CASE("synth writes a loadable dataset and is seed-deterministic") {
    const CmdResult r1 = run_cli(
        "synth --out tmp_cli_a.pdts --n 20 --win-sec 2.0 --model-len 64 --seed 5");
    REQUIRE(r1.code == 0);
    const ojson j = ojson::parse(r1.out);
    CHECK(j["command"] == "synth");
    CHECK(j["count"] == 20);
    CHECK(j["seed"] == 5);
    CHECK(j["raw_win_len"] == 50);

    const LabeledDataset ds = load_dataset("tmp_cli_a.pdts");
    CHECK(ds.size() == 20);
    CHECK(ds.has_labels);
    CHECK(ds.windows.front().size() == 64);
    CHECK(ds.fs == doctest::Approx(25.0));

    REQUIRE(run_cli("synth --out tmp_cli_b.pdts --n 20 --win-sec 2.0 "
                    "--model-len 64 --seed 5").code == 0);
    CHECK(slurp("tmp_cli_a.pdts") == slurp("tmp_cli_b.pdts"));

    REQUIRE(run_cli("synth --out tmp_cli_c.pdts --n 20 --win-sec 2.0 "
                    "--model-len 64 --seed 6").code == 0);
    CHECK(slurp("tmp_cli_a.pdts") != slurp("tmp_cli_c.pdts"));

    // without --seed one is chosen and reported so the run can be replayed
    const CmdResult r4 =
        run_cli("synth --out tmp_cli_d.pdts --n 4 --win-sec 2.0 --model-len 64");
    REQUIRE(r4.code == 0);
    CHECK(ojson::parse(r4.out)["seed"].is_number_unsigned());

    for (const char* p : {"tmp_cli_a.pdts", "tmp_cli_b.pdts", "tmp_cli_c.pdts",
                          "tmp_cli_d.pdts"})
        std::remove(p);
}

TEST_CASE("baseline matches the library detector bit-for-bit") {
    write_sine_csv("tmp_cli_sine.csv", kTone, kFs, 512);
    const CmdResult r = run_cli(
        "baseline --input tmp_cli_sine.csv --fs 25 --method fourier --unit bpm");
    REQUIRE(r.code == 0);
    const ojson j = ojson::parse(r.out);

    const TimeSeries ts = load_csv("tmp_cli_sine.csv", kFs, false);
    const DetectionResult lib = detect_fourier(ts, FrequencyBand{0.5, 4.0}, 512);
    CHECK(j["freq_hz"].get<double>() == lib.freq_hz);
    CHECK(j["freq_hz"].get<double>() == kTone);
    CHECK(j["confidence"].get<double>() == lib.confidence);
    CHECK(j["rate"].get<double>() == 60.0 * kTone);
    CHECK(j["rate_unit"] == "bpm");
    CHECK(j["method"] == "fourier");

    // presets bundle band, transform length, and unit
    const CmdResult hr = run_cli(
        "baseline --input tmp_cli_sine.csv --fs 25 --method fourier --preset hr-ppg");
    REQUIRE(hr.code == 0);
    const ojson jh = ojson::parse(hr.out);
    CHECK(jh["rate_unit"] == "bpm");
    CHECK(jh["config"]["nfft"] == 512);
    CHECK(jh["config"]["band"]["lo_hz"].get<double>() == doctest::Approx(0.5));
    CHECK(jh["config"]["band"]["hi_hz"].get<double>() == doctest::Approx(3.5));

    const CmdResult acf = run_cli(
        "baseline --input tmp_cli_sine.csv --fs 25 --method acf");
    REQUIRE(acf.code == 0);
    CHECK(ojson::parse(acf.out)["method"] == "acf");
    std::remove("tmp_cli_sine.csv");
}

TEST_CASE("spectrum writes the periodogram and reports the peak") {
    write_sine_csv("tmp_cli_sine.csv", kTone, kFs, 512);
    const CmdResult r = run_cli(
        "spectrum --input tmp_cli_sine.csv --fs 25 --out tmp_cli_spec.csv");
    REQUIRE(r.code == 0);
    const ojson j = ojson::parse(r.out);
    CHECK(j["bins"] == 257); // one-sided, nfft 512
    CHECK(j["peak_freq_hz"].get<double>() == kTone);
    CHECK(j["out_of_band_fraction"].get<double>() >= 0.0);
    CHECK(j["out_of_band_fraction"].get<double>() <= 1.0);

    std::ifstream is("tmp_cli_spec.csv");
    REQUIRE(is.good());
    std::string line;
    std::getline(is, line);
    CHECK(line == "freq_hz,power");
    std::size_t rows = 0;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 257);
    std::remove("tmp_cli_sine.csv");
    std::remove("tmp_cli_spec.csv");
}

TEST_CASE("train, detect, and neural eval round-trip") {
    REQUIRE(run_cli("synth --out tmp_cli_train.pdts --n 24 --win-sec 2.0 "
                    "--model-len 64 --seed 7").code == 0);

    const CmdResult tr = run_cli(
        "train --data tmp_cli_train.pdts --out tmp_cli_model.pdm --epochs 3 "
        "--batch 8 --base-channels 2 --seed 1 --nfft 64");
    REQUIRE(tr.code == 0);
    const ojson jt = ojson::parse(tr.out);
    CHECK(jt["command"] == "train");
    CHECK(jt["epochs_run"] == 3);
    CHECK(jt["n_windows"] == 24);
    CHECK(jt["best_epoch"].get<std::size_t>() >= 1);

    nn::CheckpointInfo info;
    nn::UNet1D<float> model = nn::load_checkpoint("tmp_cli_model.pdm", &info);
    CHECK(info.config.base_channels == 2);
    CHECK(info.pipeline.model_len == 64);
    CHECK(info.pipeline.fs == doctest::Approx(25.0));
    CHECK(info.pipeline.nfft == 64);
    CHECK(info.meta.epochs == 3);
    CHECK(info.meta.seed == 1);
    CHECK(jt["param_count"].get<std::size_t>() == model.param_count());
    CHECK(jt["best_loss"].get<double>() == info.meta.final_loss);

    const std::string hist = jt["history_csv"].get<std::string>();
    CHECK(hist == "tmp_cli_model.pdm.history.csv");
    std::ifstream is(hist);
    REQUIRE(is.good());
    std::string line;
    std::getline(is, line);
    CHECK(line == "epoch,se,ds,bw,total,lr");
    std::size_t rows = 0;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3);

    // the detector contract holds even for a barely-trained model: the
    // reported frequency lives in the band and the unit conversion is exact
    write_sine_csv("tmp_cli_sine.csv", kTone, kFs, 512);
    const CmdResult det = run_cli(
        "detect --model tmp_cli_model.pdm --input tmp_cli_sine.csv --unit bpm");
    REQUIRE(det.code == 0);
    const ojson jd = ojson::parse(det.out);
    CHECK(jd["method"] == "neural");
    const double f = jd["freq_hz"].get<double>();
    CHECK(f >= 0.5);
    CHECK(f <= 4.0);
    CHECK(jd["rate"].get<double>() == 60.0 * f);
    CHECK(jd["confidence"].get<double>() >= 0.0);
    CHECK(jd["confidence"].get<double>() <= 1.0);

    const CmdResult ev = run_cli(
        "eval --data tmp_cli_train.pdts --detector neural --model tmp_cli_model.pdm");
    REQUIRE(ev.code == 0);
    const ojson je = ojson::parse(ev.out);
    CHECK(je["config"]["threads"] == 1); // stateful forward pass: no fan-out
    CHECK(je["n"] == 24);
    CHECK(je["excluded"].get<std::size_t>() == 0);
    CHECK(je["metrics"]["mae"].get<double>() >= 0.0);
    std::remove(je["per_sample_csv"].get<std::string>().c_str());

    CHECK(run_cli("eval --data tmp_cli_train.pdts --detector neural").code == 2);

    for (const char* p : {"tmp_cli_train.pdts", "tmp_cli_model.pdm",
                          "tmp_cli_model.pdm.history.csv", "tmp_cli_sine.csv"})
        std::remove(p);
}

TEST_CASE("eval scores an exact detector at zero error") {
    LabeledDataset ds;
    ds.fs = kFs;
    ds.band = FrequencyBand{0.5, 4.0};
    ds.has_labels = true;
    for (std::size_t k : {20u, 30u, 40u, 50u}) {
        const double f = kFs * static_cast<double>(k) / 512.0;
        std::vector<double> s(512);
        for (std::size_t t = 0; t < 512; ++t)
            s[t] = std::sin(2.0 * M_PI * f * static_cast<double>(t) / kFs);
        ds.windows.emplace_back(std::move(s), kFs);
        ds.labels.push_back(f); // 25k/512 survives the file's 32-bit floats
    }
    save_dataset(ds, "tmp_cli_oracle.pdts");

    const CmdResult r = run_cli(
        "eval --data tmp_cli_oracle.pdts --detector fourier --unit bpm",
        "PDET_THREADS=2");
    REQUIRE(r.code == 0);
    const ojson j = ojson::parse(r.out);
    CHECK(j["n"] == 4);
    CHECK(j["excluded"] == 0);
    CHECK(j["metrics"]["mae"].get<double>() == 0.0);
    CHECK(j["metrics"]["rmse"].get<double>() == 0.0);
    CHECK(j["metrics"]["mape_percent"].get<double>() == 0.0);
    CHECK(j["metrics"]["rho_percent"].get<double>() == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(j["config"]["threads"].get<std::size_t>() <= 2);

    const std::string per_sample = j["per_sample_csv"].get<std::string>();
    CHECK(per_sample == "tmp_cli_oracle.pdts.fourier.samples.csv");
    std::ifstream is(per_sample);
    REQUIRE(is.good());
    std::string line;
    std::getline(is, line);
    CHECK(line == "index,truth,pred,error,ok");
    std::size_t rows = 0;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);
    std::remove(per_sample.c_str());
    std::remove("tmp_cli_oracle.pdts");
}
