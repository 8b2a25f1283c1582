// alertsift: train an output-anomaly model, correlate NIDS alerts with the
// service's responses, and keep only the alerts worth a human's time.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "alertsift/capture.hpp"
#include "alertsift/metrics.hpp"
#include "alertsift/numfmt.hpp"
#include "alertsift/pipeline.hpp"
#include "alertsift/synth.hpp"

namespace {

using namespace alertsift;

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError(path + ": cannot open for writing");
    out << content;
    if (!out) throw FormatError(path + ": write failed");
}

struct CommonOpts {
    std::string homenet = "172.16.0.0/16";
    std::string model_path;
    std::string alerts_path;
    std::string capture_path;
    double out_threshold = -1.0; // <0: use the model default
    double magnitude_threshold = std::numeric_limits<double>::max();
    std::uint32_t raised_threshold = 3;
    double timeout = 30.0;
    std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", "flat key=value file; command-line flags win");
    cmd->add_option("--homenet", opts.homenet, "comma-separated CIDR prefixes of the home net");
    cmd->add_option("--model", opts.model_path, "model file path");
    cmd->add_option("--alerts", opts.alerts_path, "input-NIDS alert feed");
    cmd->add_option("--output-capture", opts.capture_path, "capture of the service's output traffic");
    cmd->add_option("--out-threshold", opts.out_threshold,
                    "output anomaly threshold (default: 3/4 of the model's t_max)");
    cmd->add_option("--magnitude-threshold", opts.magnitude_threshold,
                    "convict alarms whose magnitude exceeds this");
    cmd->add_option("--raised-threshold", opts.raised_threshold,
                    "convict after this many repeated alerts on one endpoint pair");
    cmd->add_option("--timeout", opts.timeout, "seconds to wait for output before deciding");
    cmd->add_option("--seed", opts.seed, "deterministic seed");
}

CorrelatorConfig correlator_config(const CommonOpts& opts, const OadModel& model) {
    CorrelatorConfig config;
    config.out_threshold = opts.out_threshold >= 0 ? opts.out_threshold : default_threshold(model);
    config.magnitude_threshold = opts.magnitude_threshold;
    config.raised_threshold = opts.raised_threshold;
    config.timeout = opts.timeout;
    return config;
}

// Flat key=value config support: pairs are injected as options right after
// the subcommand token, so explicit command-line flags (parsed last) win.
std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::size_t sub_index = args.size();
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (sub_index == args.size() && !args[i].empty() && args[i][0] != '-') {
            sub_index = i;
            continue;
        }
        if (args[i] == "--config" && i + 1 < args.size())
            config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            config_path = args[i].substr(9);
    }
    if (config_path.empty() || sub_index == args.size()) return args;

    std::ifstream in(config_path);
    if (!in) throw FormatError(config_path + ": cannot open config file");
    std::vector<std::string> injected;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos || line[begin] == '#') continue;
        const std::size_t eq = line.find('=', begin);
        if (eq == std::string::npos)
            throw FormatError(config_path + ": expected key=value, got '" + line + "'");
        std::string key = line.substr(begin, eq - begin);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        std::string value = line.substr(eq + 1);
        const std::size_t vbegin = value.find_first_not_of(" \t");
        value = vbegin == std::string::npos ? "" : value.substr(vbegin);
        if (key.rfind("--", 0) != 0) key = "--" + key;
        injected.push_back(key + "=" + value);
    }
    args.insert(args.begin() + sub_index + 1, injected.begin(), injected.end());
    return args;
}

std::vector<double> parse_threshold_list(const std::string& csv) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t comma = csv.find(',', start);
        if (comma == std::string::npos) comma = csv.size();
        const std::string item = csv.substr(start, comma - start);
        if (!item.empty()) {
            try {
                std::size_t used = 0;
                const double v = std::stod(item, &used);
                if (used != item.size()) throw std::invalid_argument(item);
                out.push_back(v);
            } catch (const std::exception&) {
                throw CLI::ValidationError("--thresholds", "bad number '" + item + "'");
            }
        }
        start = comma + 1;
    }
    if (out.empty()) throw CLI::ValidationError("--thresholds", "empty threshold list");
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"correlates input-NIDS alerts with output anomalies to weed out false positives"};
    app.require_subcommand(1);

    // ---- train ----
    auto* train = app.add_subcommand("train", "fit the output anomaly model");
    CommonOpts train_opts;
    OadConfig oad_config;
    add_common(train, train_opts);
    train->add_option("--som-width", oad_config.som_width, "SOM grid width");
    train->add_option("--som-height", oad_config.som_height, "SOM grid height");
    train->add_option("--som-epochs", oad_config.som_epochs, "SOM training epochs");
    train->add_option("--eta0", oad_config.eta0, "initial SOM learning rate");
    train->add_option("--r0", oad_config.r0, "initial neighborhood radius (0 = auto)");
    train->add_option("--alpha", oad_config.alpha, "stddev smoothing constant");

    // ---- filter ----
    auto* filter = app.add_subcommand("filter", "correlate alerts with output and emit verdicts");
    CommonOpts filter_opts;
    std::string verdicts_path;
    add_common(filter, filter_opts);
    filter->add_option("--verdicts", verdicts_path, "verdict JSON-lines output")->required();

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "score verdicts against ground truth");
    CommonOpts eval_opts;
    std::string eval_verdicts, truth_path, report_path, baseline_path, input_capture;
    std::uint64_t total_packets = 0;
    add_common(eval, eval_opts);
    eval->add_option("--verdicts", eval_verdicts, "verdict JSON-lines input")->required();
    eval->add_option("--truth", truth_path, "ground-truth JSON-lines")->required();
    eval->add_option("--report", report_path, "metrics report output");
    eval->add_option("--baseline", baseline_path, "earlier report to compare against");
    eval->add_option("--total-packets", total_packets,
                     "input packet count used as the FP-rate denominator");
    eval->add_option("--input-capture", input_capture,
                     "count the FP-rate denominator from this capture");

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "rerun the filter across thresholds");
    CommonOpts sweep_opts;
    std::string sweep_truth, csv_path, thresholds_csv, sweep_input_capture;
    std::uint64_t sweep_total_packets = 0;
    add_common(sweep, sweep_opts);
    sweep->add_option("--truth", sweep_truth, "ground-truth JSON-lines")->required();
    sweep->add_option("--csv", csv_path, "sweep curve CSV output")->required();
    sweep->add_option("--thresholds", thresholds_csv,
                      "comma-separated thresholds (default: 10 points from 0 to t_max)");
    sweep->add_option("--total-packets", sweep_total_packets,
                      "input packet count used as the FP-rate denominator");
    sweep->add_option("--input-capture", sweep_input_capture,
                      "count the FP-rate denominator from this capture");

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate a labeled synthetic corpus");
    CommonOpts gen_opts;
    CorpusConfig corpus_config;
    std::string server_spec = "172.16.0.1:80";
    std::string input_out, output_out, truth_out, alerts_out;
    std::string patterns_csv = kAttackToken;
    add_common(gen, gen_opts);
    gen->add_option("--benign", corpus_config.n_benign, "benign flow count");
    gen->add_option("--attack", corpus_config.n_attack, "attack flow count");
    gen->add_option("--bait", corpus_config.n_bait, "bait flow count (alert, normal output)");
    gen->add_option("--dos", corpus_config.n_dos, "dos flow count (alert, no output)");
    gen->add_option("--server", server_spec, "server endpoint, addr:port");
    gen->add_option("--len-min", corpus_config.payload_min, "minimum response body length");
    gen->add_option("--len-max", corpus_config.payload_max, "maximum response body length");
    gen->add_option("--input-out", input_out, "input packets file")->required();
    gen->add_option("--output-out", output_out, "output packets file")->required();
    gen->add_option("--truth-out", truth_out, "truth file")->required();
    gen->add_option("--alerts-out", alerts_out, "also run the stub NIDS and write its feed");
    gen->add_option("--patterns", patterns_csv, "comma-separated stub NIDS patterns");

    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        for (CLI::Option* option : sub->get_options())
            option->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    try {
        std::vector<std::string> args = expand_config_args(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion")
            return app.exit(e);
        app.exit(e);
        return 1;
    }

    if (train->parsed()) {
        const HomeNet net = HomeNet::parse(train_opts.homenet);
        if (train_opts.capture_path.empty())
            throw FormatError("train: --output-capture is required");
        if (train_opts.model_path.empty())
            throw FormatError("train: --model is required");
        oad_config.seed = train_opts.seed;
        std::size_t skipped = 0;
        const std::vector<Packet> packets = parse_capture_file(train_opts.capture_path, &skipped);
        if (skipped) std::cerr << "warning: skipped " << skipped << " malformed records\n";
        const OadModel model = train_from_capture(packets, net, oad_config);
        save_model_file(model, train_opts.model_path);
        std::cout << "trained_count=" << model.trained_count << '\n'
                  << "t_max=" << format_double(model.t_max) << '\n'
                  << "default_threshold=" << format_double(default_threshold(model)) << '\n';
        return 0;
    }

    if (filter->parsed()) {
        const HomeNet net = HomeNet::parse(filter_opts.homenet);
        if (filter_opts.model_path.empty()) throw FormatError("filter: --model is required");
        if (filter_opts.alerts_path.empty()) throw FormatError("filter: --alerts is required");
        if (filter_opts.capture_path.empty())
            throw FormatError("filter: --output-capture is required");
        const OadModel model = load_model_file(filter_opts.model_path);
        std::size_t bad_alerts = 0;
        const std::vector<AlertRecord> alerts =
            parse_alert_file(filter_opts.alerts_path, &bad_alerts);
        if (bad_alerts) std::cerr << "warning: skipped " << bad_alerts << " malformed alerts\n";
        std::size_t bad_packets = 0;
        const std::vector<Packet> packets =
            parse_capture_file(filter_opts.capture_path, &bad_packets);
        if (bad_packets) std::cerr << "warning: skipped " << bad_packets << " malformed records\n";
        FilterStats stats;
        const std::vector<Verdict> verdicts =
            run_filter(model, alerts, packets, net, correlator_config(filter_opts, model), &stats);
        std::string out;
        std::uint64_t incidents = 0;
        for (const Verdict& v : verdicts) {
            out += verdict_to_jsonl(v);
            out += '\n';
            if (v.classification == Classification::TrueIncident) ++incidents;
        }
        write_text_file(verdicts_path, out);
        if (stats.alerts_skipped || stats.alarms_rejected)
            std::cerr << "warning: " << stats.alerts_skipped + stats.alarms_rejected
                      << " alerts outside the home net scope\n";
        std::cout << "verdicts=" << verdicts.size() << '\n'
                  << "true_incidents=" << incidents << '\n'
                  << "false_positives=" << verdicts.size() - incidents << '\n';
        return 0;
    }

    if (eval->parsed()) {
        std::ifstream vin(eval_verdicts, std::ios::binary);
        if (!vin) throw FormatError(eval_verdicts + ": cannot open");
        const std::vector<Verdict> verdicts = parse_verdicts(vin);
        if (total_packets == 0 && !input_capture.empty())
            total_packets = parse_capture_file(input_capture).size();
        const GroundTruth truth = load_truth_file(truth_path, total_packets);
        const MetricsReport report = compute_metrics(verdicts, truth);
        const std::string report_json = report_to_json(report);
        if (!report_path.empty()) write_text_file(report_path, report_json + "\n");
        std::cout << report_json << '\n';
        if (!baseline_path.empty()) {
            const MetricsReport baseline = report_from_json_file(baseline_path);
            std::cout << summary_to_json(compare_reports(baseline, report)) << '\n';
        }
        return 0;
    }

    if (sweep->parsed()) {
        const HomeNet net = HomeNet::parse(sweep_opts.homenet);
        if (sweep_opts.model_path.empty()) throw FormatError("sweep: --model is required");
        if (sweep_opts.alerts_path.empty()) throw FormatError("sweep: --alerts is required");
        if (sweep_opts.capture_path.empty())
            throw FormatError("sweep: --output-capture is required");
        const OadModel model = load_model_file(sweep_opts.model_path);
        std::size_t bad_records = 0;
        const std::vector<AlertRecord> alerts =
            parse_alert_file(sweep_opts.alerts_path, &bad_records);
        std::size_t bad_packets = 0;
        const std::vector<Packet> packets =
            parse_capture_file(sweep_opts.capture_path, &bad_packets);
        if (bad_records || bad_packets)
            std::cerr << "warning: skipped " << bad_records + bad_packets
                      << " malformed records\n";
        if (sweep_total_packets == 0 && !sweep_input_capture.empty())
            sweep_total_packets = parse_capture_file(sweep_input_capture).size();
        const GroundTruth truth = load_truth_file(sweep_truth, sweep_total_packets);
        std::vector<double> thresholds;
        if (!thresholds_csv.empty()) {
            thresholds = parse_threshold_list(thresholds_csv);
        } else {
            for (int i = 0; i < 10; ++i)
                thresholds.push_back(model.t_max * static_cast<double>(i) / 9.0);
        }
        const std::vector<SweepPoint> points = run_sweep(
            model, alerts, packets, net, correlator_config(sweep_opts, model), thresholds, truth);
        write_text_file(csv_path, sweep_to_csv(points));
        std::cout << "points=" << points.size() << '\n';
        return 0;
    }

    if (gen->parsed()) {
        const HomeNet net = HomeNet::parse(gen_opts.homenet);
        const auto server = parse_host(server_spec);
        if (!server) throw FormatError("gen: bad --server endpoint '" + server_spec + "'");
        corpus_config.server = *server;
        corpus_config.seed = gen_opts.seed;
        const Corpus corpus = generate_corpus(corpus_config);

        const std::vector<Packet> input = corpus.input_packets();
        std::string buf;
        for (const Packet& p : input) {
            buf += packet_to_jsonl(p);
            buf += '\n';
        }
        write_text_file(input_out, buf);

        buf.clear();
        for (const Packet& p : corpus.output_packets()) {
            buf += packet_to_jsonl(p);
            buf += '\n';
        }
        write_text_file(output_out, buf);

        buf.clear();
        for (const TruthRow& row : truth_rows(corpus)) {
            buf += truth_to_jsonl(row);
            buf += '\n';
        }
        write_text_file(truth_out, buf);

        if (!alerts_out.empty()) {
            std::vector<std::string> patterns;
            std::size_t start = 0;
            while (start <= patterns_csv.size()) {
                std::size_t comma = patterns_csv.find(',', start);
                if (comma == std::string::npos) comma = patterns_csv.size();
                if (comma > start) patterns.push_back(patterns_csv.substr(start, comma - start));
                start = comma + 1;
            }
            const std::vector<AlertRecord> feed = stub_nids(patterns, input, net);
            buf.clear();
            for (const AlertRecord& r : feed) {
                buf += alert_to_jsonl(r);
                buf += '\n';
            }
            write_text_file(alerts_out, buf);
            std::cout << "alerts=" << feed.size() << '\n';
        }
        std::cout << "flows=" << corpus.flows.size() << '\n';
        return 0;
    }

    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
