#include "alertsift/oad.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "alertsift/capture.hpp"
#include "alertsift/numfmt.hpp"

namespace alertsift {

namespace {

// 16 bytes: 13-byte tag, two reserved zero bytes, one version byte.
constexpr char kModelMagic[16] = {'A', 'P', 'H', 'R', 'O', 'D', 'I', 'T', 'E',
                                  '-', 'O', 'A', 'D', '\x00', '\x00', '\x01'};

nlohmann::json hex_array(std::span<const double> values) {
    nlohmann::json arr = nlohmann::json::array();
    for (double v : values) arr.push_back(format_double_hex(v));
    return arr;
}

double finite_or_fail(double v) {
    if (!std::isfinite(v)) throw FormatError("model file: non-finite value");
    return v;
}

template <std::size_t N>
void read_hex_array(const nlohmann::json& arr, std::array<double, N>& out) {
    if (!arr.is_array() || arr.size() != N)
        throw FormatError("model file: bad real array");
    for (std::size_t i = 0; i < N; ++i)
        out[i] = finite_or_fail(parse_double_hex(arr[i].get<std::string>()));
}

double get_hex(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
        throw FormatError(std::string("model file: missing field '") + key + "'");
    return finite_or_fail(parse_double_hex(j[key].get<std::string>()));
}

} // namespace

OadModel oad_train(std::span<const Packet> output_packets, const OadConfig& config) {
    if (output_packets.empty())
        throw std::invalid_argument("training stream is empty");

    std::vector<ByteHistogram> histograms;
    histograms.reserve(output_packets.size());
    for (const Packet& p : output_packets) {
        if (p.payload.empty())
            throw std::invalid_argument("training packet with empty payload");
        histograms.push_back(histogram(p.payload));
    }

    OadModel model;
    model.alpha = config.alpha;
    model.som = som_init(config.som_width, config.som_height, config.seed);
    model.som.epochs = config.som_epochs;
    model.som.eta0 = config.eta0;
    if (config.r0 > 0.0) model.som.r0 = config.r0;
    model.som = som_train(std::move(model.som), histograms);

    for (std::size_t i = 0; i < output_packets.size(); ++i) {
        const ClassKey key{output_packets[i].source.port, som_classify(model.som, histograms[i])};
        auto [it, inserted] = model.classes.try_emplace(key);
        if (inserted) it->second.alpha = config.alpha;
        stats_update(it->second, histograms[i]);
    }
    model.trained_count = output_packets.size();

    // Scores are taken against the finished model so t_max does not depend on
    // how far training had progressed when each packet was seen.
    model.t_max = 0.0;
    for (const Packet& p : output_packets)
        model.t_max = std::max(model.t_max, oad_score(model, p));
    return model;
}

double oad_score(const OadModel& model, const Packet& p) {
    if (p.payload.empty())
        throw std::invalid_argument("cannot score an empty payload");
    const ByteHistogram h = histogram(p.payload);
    const ClassKey key{p.source.port, som_classify(model.som, h)};
    const auto it = model.classes.find(key);
    if (it == model.classes.end())
        return std::numeric_limits<double>::infinity(); // no model of this output
    return stats_score(it->second, h);
}

void save_model(const OadModel& model, std::ostream& out) {
    nlohmann::json som;
    som["width"] = model.som.width;
    som["height"] = model.som.height;
    som["epochs"] = model.som.epochs;
    som["eta0"] = format_double_hex(model.som.eta0);
    som["r0"] = format_double_hex(model.som.r0);
    som["seed"] = model.som.seed;
    nlohmann::json weights = nlohmann::json::array();
    for (const ByteHistogram& w : model.som.weights) weights.push_back(hex_array(w));
    som["weights"] = std::move(weights);

    nlohmann::json classes = nlohmann::json::array();
    for (const auto& [key, cm] : model.classes) {
        nlohmann::json c;
        c["server_port"] = key.server_port;
        c["som_class"] = key.som_class;
        c["n"] = cm.n;
        c["mean"] = hex_array(cm.mean);
        c["m2"] = hex_array(cm.m2);
        classes.push_back(std::move(c));
    }

    nlohmann::json body;
    body["som"] = std::move(som);
    body["classes"] = std::move(classes);
    body["alpha"] = format_double_hex(model.alpha);
    body["t_max"] = format_double_hex(model.t_max);
    body["trained_count"] = model.trained_count;

    out.write(kModelMagic, sizeof(kModelMagic));
    out << body.dump() << '\n';
}

OadModel load_model(std::istream& in) {
    char magic[16];
    in.read(magic, sizeof(magic));
    if (in.gcount() != sizeof(magic))
        throw FormatError("model file: truncated magic");
    if (std::memcmp(magic, kModelMagic, 13) != 0)
        throw FormatError("model file: bad magic");
    if (std::memcmp(magic, kModelMagic, sizeof(kModelMagic)) != 0)
        throw FormatError("model file: unsupported version");

    nlohmann::json body;
    try {
        in >> body;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model file: truncated or damaged body: ") + e.what());
    }
    if (!body.is_object() || !body.contains("som") || !body.contains("classes"))
        throw FormatError("model file: missing sections");

    OadModel model;
    const nlohmann::json& som = body["som"];
    model.som.width = som.at("width").get<int>();
    model.som.height = som.at("height").get<int>();
    if (model.som.width < 1 || model.som.height < 1)
        throw FormatError("model file: bad SOM dimensions");
    model.som.epochs = som.at("epochs").get<int>();
    model.som.eta0 = get_hex(som, "eta0");
    model.som.r0 = get_hex(som, "r0");
    model.som.seed = som.at("seed").get<std::uint64_t>();
    const nlohmann::json& weights = som.at("weights");
    if (!weights.is_array() ||
        weights.size() != static_cast<std::size_t>(model.som.width) * model.som.height)
        throw FormatError("model file: SOM weight table size mismatch");
    model.som.weights.resize(weights.size());
    for (std::size_t j = 0; j < weights.size(); ++j)
        read_hex_array(weights[j], model.som.weights[j]);

    model.alpha = get_hex(body, "alpha");
    model.t_max = get_hex(body, "t_max");
    model.trained_count = body.at("trained_count").get<std::uint64_t>();

    for (const nlohmann::json& c : body["classes"]) {
        ClassKey key{c.at("server_port").get<std::uint16_t>(), c.at("som_class").get<int>()};
        if (key.som_class < 0 || key.som_class >= model.som.node_count())
            throw FormatError("model file: class index out of range");
        ClassModel cm;
        cm.n = c.at("n").get<std::uint64_t>();
        cm.alpha = model.alpha;
        read_hex_array(c.at("mean"), cm.mean);
        read_hex_array(c.at("m2"), cm.m2);
        if (!model.classes.emplace(key, std::move(cm)).second)
            throw FormatError("model file: duplicate class entry");
    }
    return model;
}

void save_model_file(const OadModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError(path + ": cannot open for writing");
    save_model(model, out);
    if (!out) throw FormatError(path + ": write failed");
}

OadModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open");
    return load_model(in);
}

} // namespace alertsift
