#ifndef ALERTSIFT_OAD_HPP
#define ALERTSIFT_OAD_HPP

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>

#include "alertsift/bytestats.hpp"
#include "alertsift/som.hpp"
#include "alertsift/traffic.hpp"

namespace alertsift {

struct OadConfig {
    int som_width = 8;
    int som_height = 8;
    int som_epochs = 3;
    double eta0 = 0.5;
    double r0 = 0.0; // <= 0 means max(width, height) / 2
    std::uint64_t seed = 1;
    double alpha = 0.001;
};

struct ClassKey {
    std::uint16_t server_port = 0;
    int som_class = 0;

    auto operator<=>(const ClassKey&) const = default;
};

// The trained model of normal output: SOM classifier plus per-class byte
// statistics, and the largest score any training packet reached.
struct OadModel {
    SomGrid som;
    std::map<ClassKey, ClassModel> classes;
    double t_max = 0.0;
    std::uint64_t trained_count = 0;
    double alpha = 0.001;
};

// Three-phase fit: train the SOM on every payload histogram, freeze it and
// fill the per-class statistics, then score the training packets against the
// frozen model to find t_max. Caller supplies outbound packets with non-empty
// payloads; throws on an empty sequence.
OadModel oad_train(std::span<const Packet> output_packets, const OadConfig& config);

// Anomaly score of one outgoing packet; +infinity when no class was ever
// trained for (source port, SOM class). Throws on an empty payload.
double oad_score(const OadModel& model, const Packet& p);

inline double default_threshold(const OadModel& model) { return 0.75 * model.t_max; }

// Model file: fixed 16-byte magic, then a JSON body with every real encoded
// as a hex-float string so reload is bit-exact.
void save_model(const OadModel& model, std::ostream& out);
OadModel load_model(std::istream& in);
void save_model_file(const OadModel& model, const std::string& path);
OadModel load_model_file(const std::string& path);

} // namespace alertsift

#endif
