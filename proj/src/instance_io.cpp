#include "fwss/instance_io.hpp"

#include <fstream>
#include <set>

namespace fwss {

std::string to_decimal(const BigInt& value) { return value.str(); }

BigInt parse_decimal(const std::string& text) {
    if (text.empty()) throw InputError("empty decimal string");
    std::size_t start = text[0] == '-' ? 1 : 0;
    if (start == text.size()) throw InputError("malformed decimal string: " + text);
    for (std::size_t i = start; i < text.size(); ++i) {
        if (text[i] < '0' || text[i] > '9') throw InputError("malformed decimal string: " + text);
    }
    return BigInt(text);
}

nlohmann::json instance_to_json(const Instance& instance) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& w : instance.weights()) a.push_back(to_decimal(w));
    return {{"n", instance.n()}, {"ell", instance.ell()}, {"t", to_decimal(instance.target())}, {"a", a}};
}

Instance instance_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw InputError("instance document must be a JSON object");
    static const std::set<std::string> known = {"n", "ell", "t", "a"};
    for (const auto& [key, _] : doc.items()) {
        if (!known.contains(key)) throw InputError("unknown instance field: " + key);
    }
    for (const auto& key : known) {
        if (!doc.contains(key)) throw InputError("missing instance field: " + key);
    }
    if (!doc["n"].is_number_unsigned() || !doc["ell"].is_number_unsigned()) {
        throw InputError("n and ell must be nonnegative integers");
    }
    if (!doc["t"].is_string() || !doc["a"].is_array()) {
        throw InputError("t must be a decimal string and a an array of decimal strings");
    }
    auto n = doc["n"].get<std::size_t>();
    std::vector<BigInt> weights;
    for (const auto& entry : doc["a"]) {
        if (!entry.is_string()) throw InputError("weights must be decimal strings");
        weights.push_back(parse_decimal(entry.get<std::string>()));
    }
    if (weights.size() != n) throw InputError("n does not match the number of weights");
    return Instance(std::move(weights), parse_decimal(doc["t"].get<std::string>()),
                    doc["ell"].get<std::size_t>());
}

Instance read_instance_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ResourceError("cannot open instance file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("instance file is not valid JSON: ") + e.what());
    }
    return instance_from_json(doc);
}

void write_instance_file(const std::filesystem::path& path, const Instance& instance) {
    std::ofstream out(path);
    if (!out) throw ResourceError("cannot write instance file " + path.string());
    out << instance_to_json(instance).dump() << '\n';
    if (!out) throw ResourceError("write failed for " + path.string());
}

}  // namespace fwss
