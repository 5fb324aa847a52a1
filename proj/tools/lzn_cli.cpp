// Command-line front end: simulate -> detect -> evaluate workflows plus the
// analytical model tables and the sweep experiments behind the result
// figures.  All randomness is seeded explicitly; rerunning a command with the
// same flags reproduces its outputs byte for byte.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lzn/lzn.hpp"

namespace {

struct PhyFlags {
    unsigned sf = 8;
    double bw = 125000.0;
    unsigned os = 4;

    void attach(CLI::App* cmd) {
        cmd->add_option("--sf", sf, "spreading factor (7-12)")->capture_default_str();
        cmd->add_option("--bw", bw, "bandwidth in Hz")->capture_default_str();
        cmd->add_option("--os", os, "oversampling factor")->capture_default_str();
    }
    lzn::LoRaParams params() const {
        lzn::LoRaParams p;
        p.sf = sf;
        p.bandwidth_hz = bw;
        p.oversampling = os;
        p.validate();
        return p;
    }
};

lzn::GridConfig parse_grid(const std::string& spec) {
    lzn::GridConfig g;
    const auto x = spec.find('x');
    if (x == std::string::npos)
        throw CLI::ValidationError("--grid", "expected NdxNf, e.g. 2x2");
    g.n_delta = static_cast<unsigned>(std::stoul(spec.substr(0, x)));
    g.n_freq = static_cast<unsigned>(std::stoul(spec.substr(x + 1)));
    g.validate();
    return g;
}

std::vector<double> parse_range(const std::string& spec) {
    // "lo:hi:step" or a comma list
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        const auto c1 = spec.find(':');
        const auto c2 = spec.find(':', c1 + 1);
        if (c2 == std::string::npos)
            throw CLI::ValidationError("range", "expected lo:hi:step");
        const double lo = std::stod(spec.substr(0, c1));
        const double hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
        const double step = std::stod(spec.substr(c2 + 1));
        if (step <= 0) throw CLI::ValidationError("range", "step must be > 0");
        for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
    } else {
        std::size_t pos = 0;
        while (pos < spec.size()) {
            auto comma = spec.find(',', pos);
            if (comma == std::string::npos) comma = spec.size();
            out.push_back(std::stod(spec.substr(pos, comma - pos)));
            pos = comma + 1;
        }
    }
    return out;
}

lzn::phy::CodingRate parse_cr(unsigned cr) {
    if (cr < 1 || cr > 4) throw CLI::ValidationError("--cr", "coding rate index 1..4");
    return static_cast<lzn::phy::CodingRate>(cr);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LoRa frame synchronization toolbox"};
    app.require_subcommand(1);

    // ---------------------------------------------------------------- simulate
    auto* sim_cmd = app.add_subcommand("simulate", "render a capture and its ground truth");
    PhyFlags sim_phy;
    sim_phy.attach(sim_cmd);
    double sim_rate = 0.0, sim_duration = 1.0, sim_snr = 10.0, sim_cfo = 0.0,
           sim_start = -1.0, sim_snr_hi = std::nan("");
    unsigned sim_payload = 12, sim_cr = 4;
    std::uint64_t sim_seed = 1;
    std::string sim_out = "scene";
    sim_cmd->add_option("--rate-pps", sim_rate, "Poisson traffic rate; 0 = single frame")
        ->capture_default_str();
    sim_cmd->add_option("--duration-s", sim_duration, "scene duration")->capture_default_str();
    sim_cmd->add_option("--snr-db", sim_snr, "frame SNR (or lower bound)")->capture_default_str();
    sim_cmd->add_option("--snr-hi-db", sim_snr_hi, "upper SNR bound for traffic scenes");
    sim_cmd->add_option("--cfo-hz", sim_cfo, "single-frame CFO")->capture_default_str();
    sim_cmd->add_option("--start", sim_start, "single-frame start (Nyquist samples)");
    sim_cmd->add_option("--payload-len", sim_payload, "payload bytes")->capture_default_str();
    sim_cmd->add_option("--cr", sim_cr, "coding rate index 1..4 (4/5..4/8)")
        ->capture_default_str();
    sim_cmd->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
    sim_cmd->add_option("--out", sim_out, "output prefix")->capture_default_str();

    // ------------------------------------------------------------------ detect
    auto* det_cmd = app.add_subcommand("detect", "run the synchronizer over a capture");
    PhyFlags det_phy;
    det_phy.attach(det_cmd);
    std::string det_in = "scene.iq", det_out = "detections.jsonl", det_grid = "2x2",
                det_hyp_out;
    det_cmd->add_option("--in", det_in, "capture file")->capture_default_str();
    det_cmd->add_option("--grid", det_grid, "NdxNf fractional grid")->capture_default_str();
    det_cmd->add_option("--out", det_out, "detections (JSON lines)")->capture_default_str();
    det_cmd->add_option("--hyp-out", det_hyp_out, "also dump raw coarse hypotheses");

    // ---------------------------------------------------------------- evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "score detections against ground truth");
    PhyFlags eval_phy;
    eval_phy.attach(eval_cmd);
    std::string eval_truth = "scene.truth.jsonl", eval_det = "detections.jsonl",
                eval_capture = "scene.iq", eval_out = "metrics.csv";
    double eval_tol = 0.0;
    eval_cmd->add_option("--truth", eval_truth)->capture_default_str();
    eval_cmd->add_option("--detections", eval_det)->capture_default_str();
    eval_cmd->add_option("--capture", eval_capture)->capture_default_str();
    eval_cmd->add_option("--tol-samples", eval_tol,
                         "matching tolerance (default M/2); reported in the CSV");
    eval_cmd->add_option("--out", eval_out)->capture_default_str();

    // ------------------------------------------------------------------- model
    auto* model_cmd = app.add_subcommand("model", "analytical / Monte Carlo model tables");
    std::string model_kind = "single", model_axis = "-20:-8:0.25", model_out = "model.csv";
    unsigned model_sf = 8;
    std::string model_l = "1,2,3,4,5,6,7";
    std::size_t model_trials = 10000;
    std::uint64_t model_seed = 1;
    model_cmd->add_option("--kind", model_kind, "single | single-mc | two-user | two-user-preamble | opposite")
        ->capture_default_str();
    model_cmd->add_option("--sf", model_sf)->capture_default_str();
    model_cmd->add_option("--axis", model_axis, "lo:hi:step or comma list (dB)")
        ->capture_default_str();
    model_cmd->add_option("--l-list", model_l, "intersection depths")->capture_default_str();
    model_cmd->add_option("--trials", model_trials)->capture_default_str();
    model_cmd->add_option("--seed", model_seed)->capture_default_str();
    model_cmd->add_option("--out", model_out)->capture_default_str();

    // ------------------------------------------------------------------ sweeps
    auto* ssnr = app.add_subcommand("sweep-snr", "single-user sensitivity sweep");
    PhyFlags ssnr_phy;
    ssnr_phy.attach(ssnr);
    std::string ssnr_axis = "-20:-6:1", ssnr_grid = "2x2", ssnr_out = "snr_sweep.csv";
    unsigned ssnr_trials = 300, ssnr_payload = 12, ssnr_cr = 4;
    std::uint64_t ssnr_seed = 1;
    ssnr->add_option("--snr-db", ssnr_axis, "lo:hi:step or comma list")->capture_default_str();
    ssnr->add_option("--grid", ssnr_grid)->capture_default_str();
    ssnr->add_option("--trials", ssnr_trials)->capture_default_str();
    ssnr->add_option("--payload-len", ssnr_payload)->capture_default_str();
    ssnr->add_option("--cr", ssnr_cr)->capture_default_str();
    ssnr->add_option("--seed", ssnr_seed)->capture_default_str();
    ssnr->add_option("--out", ssnr_out)->capture_default_str();

    auto* srate = app.add_subcommand("sweep-rate", "multi-user traffic sweep");
    PhyFlags srate_phy;
    srate_phy.attach(srate);
    std::string srate_axis = "5,10,20,30,40,50,60", srate_grid = "2x2",
                srate_out = "rate_sweep.csv";
    double srate_duration = 2.0, srate_snr_lo = 0.0, srate_snr_hi = 10.0;
    unsigned srate_trials = 10, srate_payload = 12, srate_cr = 4;
    std::uint64_t srate_seed = 1;
    srate->add_option("--rate-pps", srate_axis)->capture_default_str();
    srate->add_option("--duration-s", srate_duration)->capture_default_str();
    srate->add_option("--grid", srate_grid)->capture_default_str();
    srate->add_option("--trials", srate_trials)->capture_default_str();
    srate->add_option("--snr-lo", srate_snr_lo)->capture_default_str();
    srate->add_option("--snr-hi", srate_snr_hi)->capture_default_str();
    srate->add_option("--payload-len", srate_payload)->capture_default_str();
    srate->add_option("--cr", srate_cr)->capture_default_str();
    srate->add_option("--seed", srate_seed)->capture_default_str();
    srate->add_option("--out", srate_out)->capture_default_str();

    auto* soff = app.add_subcommand("sweep-offset", "two-user collision offset sweep");
    PhyFlags soff_phy;
    soff_phy.attach(soff);
    std::string soff_axis = "-12:-1:1,0,0.5,1,10.5,12", soff_grid = "2x2",
                soff_out = "offset_sweep.csv";
    unsigned soff_trials = 200, soff_payload = 12, soff_cr = 4;
    double soff_snr_lo = 0.0, soff_snr_hi = 10.0;
    std::uint64_t soff_seed = 1;
    soff->add_option("--offsets", soff_axis, "interferer offsets in symbols")
        ->capture_default_str();
    soff->add_option("--grid", soff_grid)->capture_default_str();
    soff->add_option("--trials", soff_trials)->capture_default_str();
    soff->add_option("--snr-lo", soff_snr_lo)->capture_default_str();
    soff->add_option("--snr-hi", soff_snr_hi)->capture_default_str();
    soff->add_option("--payload-len", soff_payload)->capture_default_str();
    soff->add_option("--cr", soff_cr)->capture_default_str();
    soff->add_option("--seed", soff_seed)->capture_default_str();
    soff->add_option("--out", soff_out)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim_cmd) {
            const lzn::LoRaParams params = sim_phy.params();
            lzn::phy::FramePayload proto;
            proto.coding_rate = parse_cr(sim_cr);
            proto.bytes.resize(sim_payload);

            lzn::sim::TrafficScene scene;
            if (sim_rate > 0.0) {
                lzn::sim::SnrDistribution snr{sim_snr,
                                              std::isnan(sim_snr_hi) ? sim_snr : sim_snr_hi};
                scene = lzn::sim::poisson_traffic(sim_rate, sim_duration, params, proto, snr,
                                                  sim_seed);
            } else {
                auto rng = lzn::make_rng(sim_seed, 0, 0x636c69);
                std::uniform_int_distribution<int> byte(0, 255);
                for (auto& b : proto.bytes) b = static_cast<std::uint8_t>(byte(rng));
                scene.seed = sim_seed;
                const unsigned m = params.symbol_bins();
                lzn::sim::FrameSpec f;
                f.start = sim_start >= 0.0 ? sim_start : 2.0 * m;
                f.cfo_hz = sim_cfo;
                f.amplitude = std::pow(10.0, sim_snr / 20.0);
                f.payload = proto;
                scene.frames.push_back(f);
                scene.duration_samples = std::llround(
                    f.start + lzn::sim::frame_length_samples(proto, params) + 4.0 * m);
            }
            lzn::sim::RenderedScene rendered = lzn::sim::render_scene(scene, params);
            lzn::save_capture(sim_out + ".iq", rendered.capture, params);
            lzn::io::save_truth(sim_out + ".truth.jsonl", rendered.truth);
            std::printf("wrote %s.iq (%zu raw samples), %zu frames\n", sim_out.c_str(),
                        rendered.capture.samples.size(), rendered.truth.frames.size());
        } else if (*det_cmd) {
            const lzn::LoRaParams params = det_phy.params();
            const lzn::GridConfig grid = parse_grid(det_grid);
            lzn::IqCapture capture = lzn::load_capture(det_in);
            lzn::FrameDetector detector(params, grid);
            std::vector<lzn::Hypothesis> hyps;
            if (!det_hyp_out.empty()) detector.log_hypotheses(&hyps);
            const std::vector<lzn::SyncResult> results = detector.detect(capture);
            lzn::io::save_detections(det_out, results);
            if (!det_hyp_out.empty()) lzn::io::save_hypotheses(det_hyp_out, hyps);
            const lzn::DetectorReport& rep = detector.report();
            std::printf("%zu validated detections over %llu windows\n", results.size(),
                        static_cast<unsigned long long>(rep.windows_processed));
            std::printf("full FFTs per window: %.3f (grid %ux%u)\n",
                        rep.full_ffts_per_window(), grid.n_delta, grid.n_freq);
            std::printf("full-FFT equivalents per hypothesis: %.3f over %llu hypotheses\n",
                        rep.fft_equivalents_per_hypothesis(params.symbol_bins()),
                        static_cast<unsigned long long>(rep.hypotheses));
        } else if (*eval_cmd) {
            const lzn::LoRaParams params = eval_phy.params();
            lzn::IqCapture capture = lzn::load_capture(eval_capture);
            const lzn::sim::GroundTruth truth = lzn::io::load_truth(eval_truth);
            const std::vector<lzn::SyncResult> detections = lzn::io::load_detections(eval_det);
            lzn::SpectralEngine engine;
            const std::optional<double> tol =
                eval_tol > 0.0 ? std::optional<double>(eval_tol) : std::nullopt;
            const lzn::sim::Metrics mt =
                lzn::sim::evaluate_scene(engine, capture, truth, detections, params, tol);
            lzn::io::CsvTable table({"tol_samples", "mfr", "fdr", "per", "prr",
                                     "false_positives", "truth_frames", "matched", "decoded"});
            table.add_row({tol.value_or(params.symbol_bins() / 2.0), mt.mfr, mt.fdr, mt.per,
                           mt.prr, double(mt.false_positives), double(mt.truth_count),
                           double(mt.matched), double(mt.decoded)});
            table.save(eval_out);
            std::printf("MFR %.4f  FDR %.4f  PER %.4f  PRR %.4f  FP %zu\n", mt.mfr, mt.fdr,
                        mt.per, mt.prr, mt.false_positives);
        } else if (*model_cmd) {
            const std::vector<double> axis = parse_range(model_axis);
            std::vector<unsigned> ls;
            for (double v : parse_range(model_l)) ls.push_back(unsigned(v));

            if (model_kind == "opposite") {
                lzn::io::CsvTable table({"sf", "threshold_db"});
                table.add_row({double(model_sf), lzn::model::opposite_chirp_threshold(model_sf)});
                table.save(model_out);
            } else {
                std::vector<std::string> header{"snr_or_sir_db"};
                for (unsigned l : ls) header.push_back("L" + std::to_string(l));
                lzn::io::CsvTable table(header);
                std::vector<std::vector<double>> rows(axis.size());
                lzn::parallel_for(axis.size(), [&](std::size_t i) {
                    lzn::SpectralEngine engine;
                    std::vector<double> row{axis[i]};
                    for (unsigned l : ls) {
                        double p = 0.0;
                        if (model_kind == "single")
                            p = lzn::model::single_user_success(axis[i], model_sf, l);
                        else if (model_kind == "single-mc")
                            p = lzn::model::preamble_mc_detection(engine, axis[i], model_sf, l,
                                                                  model_trials, model_seed);
                        else if (model_kind == "two-user")
                            p = lzn::model::two_user_success_mc(engine, axis[i], model_sf, l,
                                                                model_trials, model_seed,
                                                                lzn::model::TwoUserMode::model);
                        else if (model_kind == "two-user-preamble")
                            p = lzn::model::two_user_success_mc(
                                engine, axis[i], model_sf, l, model_trials, model_seed,
                                lzn::model::TwoUserMode::preamble);
                        else
                            throw CLI::ValidationError("--kind", "unknown model kind");
                        row.push_back(p);
                    }
                    rows[i] = std::move(row);
                });
                for (auto& r : rows) table.add_row(r);
                table.save(model_out);
            }
            std::printf("wrote %s\n", model_out.c_str());
        } else if (*ssnr) {
            const lzn::LoRaParams params = ssnr_phy.params();
            lzn::sim::SnrSweepConfig cfg;
            cfg.snr_db = parse_range(ssnr_axis);
            cfg.trials = ssnr_trials;
            cfg.payload_len = ssnr_payload;
            cfg.cr = parse_cr(ssnr_cr);
            cfg.seed = ssnr_seed;
            const auto rows = lzn::sim::snr_sweep(params, parse_grid(ssnr_grid), cfg);
            lzn::sim::sweep_to_csv("snr_db", rows).save(ssnr_out);
            std::printf("wrote %s\n", ssnr_out.c_str());
        } else if (*srate) {
            const lzn::LoRaParams params = srate_phy.params();
            lzn::sim::RateSweepConfig cfg;
            cfg.rate_pkt_s = parse_range(srate_axis);
            cfg.duration_s = srate_duration;
            cfg.trials = srate_trials;
            cfg.payload_len = srate_payload;
            cfg.cr = parse_cr(srate_cr);
            cfg.snr = {srate_snr_lo, srate_snr_hi};
            cfg.seed = srate_seed;
            const auto rows = lzn::sim::rate_sweep(params, parse_grid(srate_grid), cfg);
            lzn::sim::sweep_to_csv("tx_rate", rows).save(srate_out);
            std::printf("wrote %s\n", srate_out.c_str());
        } else if (*soff) {
            const lzn::LoRaParams params = soff_phy.params();
            lzn::sim::OffsetSweepConfig cfg;
            cfg.offsets_symbols = parse_range(soff_axis);
            cfg.trials = soff_trials;
            cfg.payload_len = soff_payload;
            cfg.cr = parse_cr(soff_cr);
            cfg.snr = {soff_snr_lo, soff_snr_hi};
            cfg.seed = soff_seed;
            const auto rows = lzn::sim::offset_sweep(params, parse_grid(soff_grid), cfg);
            lzn::sim::sweep_to_csv("offset_symbols", rows).save(soff_out);
            std::printf("wrote %s\n", soff_out.c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
