#include "drcbf/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>

namespace drcbf {

using nlohmann::json;

namespace {

/// A JSON value together with its location in the document.
struct Cursor {
    const json& value;
    std::string path;

    Cursor at(const std::string& key) const { return {value.at(key), path.empty() ? key : path + "." + key}; }
    Cursor at(std::size_t i) const { return {value.at(i), path + "[" + std::to_string(i) + "]"}; }
    bool has(const std::string& key) const { return value.contains(key); }
    [[noreturn]] void fail(const std::string& message) const { throw ConfigError(path.empty() ? "<root>" : path, message); }
};

void require_object(const Cursor& c, std::initializer_list<const char*> allowed)
{
    if (!c.value.is_object()) c.fail("expected an object");
    std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, _] : c.value.items()) {
        if (!keys.count(key)) c.at(key).fail("unknown key");
    }
}

double number(const Cursor& c)
{
    if (!c.value.is_number()) c.fail("expected a number");
    const double v = c.value.get<double>();
    if (!std::isfinite(v)) c.fail("expected a finite number");
    return v;
}

double positive(const Cursor& c)
{
    const double v = number(c);
    if (!(v > 0.0)) c.fail("must be strictly positive");
    return v;
}

void read_number(const Cursor& parent, const char* key, double& out, bool strictly_positive = true)
{
    if (!parent.has(key)) return;
    out = strictly_positive ? positive(parent.at(key)) : number(parent.at(key));
}

/// A scalar is broadcast to every one of `size` entries.
std::vector<double> positive_list(const Cursor& c, std::size_t size)
{
    if (c.value.is_number()) return std::vector<double>(size, positive(c));
    if (!c.value.is_array()) c.fail("expected a number or an array of numbers");
    if (c.value.size() != size) c.fail("expected " + std::to_string(size) + " entries");
    std::vector<double> out;
    for (std::size_t i = 0; i < size; ++i) out.push_back(positive(c.at(i)));
    return out;
}

std::string text(const Cursor& c)
{
    if (!c.value.is_string()) c.fail("expected a string");
    return c.value.get<std::string>();
}

bool boolean(const Cursor& c)
{
    if (!c.value.is_boolean()) c.fail("expected true or false");
    return c.value.get<bool>();
}

SignalTerm parse_term(const Cursor& c, double hold)
{
    if (!c.value.is_object()) c.fail("expected an object");
    if (!c.has("type")) c.fail("missing key 'type'");
    const std::string type = text(c.at("type"));
    if (type == "constant") {
        require_object(c, {"type", "value"});
        ConstantTerm t;
        if (c.has("value")) t.value = number(c.at("value"));
        return t;
    }
    if (type == "sinusoid") {
        require_object(c, {"type", "amplitude", "frequency", "phase", "function"});
        SinusoidTerm t;
        if (c.has("amplitude")) t.amplitude = number(c.at("amplitude"));
        if (c.has("frequency")) t.angular_frequency = number(c.at("frequency"));
        if (c.has("phase")) t.phase = number(c.at("phase"));
        if (c.has("function")) {
            const auto fn = text(c.at("function"));
            if (fn == "sin") t.kind = SinusoidTerm::Kind::sin;
            else if (fn == "cos") t.kind = SinusoidTerm::Kind::cos;
            else c.at("function").fail("expected \"sin\" or \"cos\"");
        }
        return t;
    }
    if (type == "uniform_noise") {
        require_object(c, {"type", "low", "high", "hold"});
        UniformNoiseTerm t;
        t.hold_interval = hold;
        if (c.has("low")) t.low = number(c.at("low"));
        if (c.has("high")) t.high = number(c.at("high"));
        if (c.has("hold")) t.hold_interval = positive(c.at("hold"));
        if (t.low > t.high) c.at("low").fail("exceeds 'high'");
        return t;
    }
    c.at("type").fail("unknown term type '" + type + "' (expected constant, sinusoid or uniform_noise)");
}

std::vector<SignalTerm> parse_channel(const Cursor& c, double hold)
{
    if (!c.value.is_array()) c.fail("expected an array of terms");
    std::vector<SignalTerm> out;
    for (std::size_t i = 0; i < c.value.size(); ++i) out.push_back(parse_term(c.at(i), hold));
    return out;
}

void parse_model(const Cursor& c, AccParameters& p)
{
    require_object(c, {"mass", "lead_speed", "f0", "f1", "f2", "min_distance", "desired_speed",
                       "disturbance_channels"});
    read_number(c, "mass", p.mass);
    read_number(c, "lead_speed", p.lead_speed);
    read_number(c, "f0", p.f0);
    read_number(c, "f1", p.f1);
    read_number(c, "f2", p.f2);
    read_number(c, "min_distance", p.min_distance);
    read_number(c, "desired_speed", p.desired_speed);
    if (c.has("disturbance_channels")) p.disturbance_channels = boolean(c.at("disturbance_channels"));
}

void parse_controller(const Cursor& c, AccScenario& s)
{
    require_object(c, {"type", "poles", "k", "k_multiplier", "eta", "r", "disturbance_bound", "sigma",
                       "slack_weight", "control_period"});
    auto& p = s.params;
    if (c.has("type")) {
        try {
            s.controller = parse_barrier_mode(text(c.at("type")));
        } catch (const ConfigError&) {
            throw;
        } catch (const ValidationError& e) {
            c.at("type").fail(e.what());
        }
    }
    if (c.has("poles")) p.poles = positive_list(c.at("poles"), 2);
    if (c.has("k")) {
        const auto k = c.at("k");
        if (k.value.is_string()) {
            if (text(k) != "optimal") k.fail("expected numbers or \"optimal\"");
            s.optimal_k = true;
        } else {
            p.k = positive_list(k, 2);
            s.optimal_k = false;
        }
    }
    read_number(c, "k_multiplier", s.k_multiplier);
    if (c.has("eta")) s.eta = positive_list(c.at("eta"), 2);
    if (c.has("r")) p.r = positive_list(c.at("r"), 2);
    if (c.has("disturbance_bound")) {
        const auto d = c.at("disturbance_bound");
        if (d.value.is_string()) {
            if (text(d) != "nominal") d.fail("expected a number or \"nominal\"");
            s.disturbance_bound.reset();
        } else {
            const double v = number(d);
            if (v < 0.0) d.fail("must be nonnegative");
            s.disturbance_bound = v;
        }
    }
    read_number(c, "sigma", p.sigma);
    read_number(c, "slack_weight", p.slack_weight);
    read_number(c, "control_period", s.control_period);
}

}  // namespace

RunConfig parse_run_config(const json& document)
{
    const Cursor root{document, ""};
    require_object(root, {"model", "initial_state", "controller", "disturbance", "simulation", "output"});
    RunConfig config;
    auto& s = config.scenario;
    s.disturbance.channels = {{}, {}};

    if (root.has("model")) parse_model(root.at("model"), s.params);
    if (root.has("initial_state")) {
        const auto c = root.at("initial_state");
        require_object(c, {"distance", "speed"});
        read_number(c, "distance", s.params.initial_distance);
        read_number(c, "speed", s.params.initial_speed, false);
        if (!(s.params.initial_distance > s.params.min_distance)) {
            c.at("distance").fail("must exceed model.min_distance");
        }
    }
    if (root.has("controller")) parse_controller(root.at("controller"), s);
    if (root.has("disturbance")) {
        const auto c = root.at("disturbance");
        require_object(c, {"seed", "noise_hold", "d_u", "d_m"});
        double hold = s.control_period;
        if (c.has("seed")) {
            const auto seed = c.at("seed");
            if (!seed.value.is_number_integer() || seed.value.get<long long>() < 0) seed.fail("expected a nonnegative integer");
            s.disturbance.seed = seed.value.get<std::uint64_t>();
        }
        read_number(c, "noise_hold", hold);
        if (c.has("d_u")) s.disturbance.channels[0] = parse_channel(c.at("d_u"), hold);
        if (c.has("d_m")) s.disturbance.channels[1] = parse_channel(c.at("d_m"), hold);
    }
    if (root.has("simulation")) {
        const auto c = root.at("simulation");
        require_object(c, {"horizon", "substeps"});
        read_number(c, "horizon", s.horizon);
        if (c.has("substeps")) {
            const auto n = c.at("substeps");
            if (!n.value.is_number_integer() || n.value.get<long long>() < 1) n.fail("expected a positive integer");
            s.substeps = n.value.get<int>();
        }
    }
    if (root.has("output")) {
        const auto c = root.at("output");
        require_object(c, {"dir", "plots"});
        if (c.has("dir")) config.output_dir = text(c.at("dir"));
        if (c.has("plots")) config.plots = boolean(c.at("plots"));
    }
    try {
        s.params.validate();
    } catch (const ValidationError& e) {
        throw ConfigError("<root>", e.what());
    }
    return config;
}

json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path, std::string("malformed JSON: ") + e.what());
    }
}

void set_config_value(json& document, std::string_view path, const json& value)
{
    if (path.empty()) throw ConfigError("<root>", "empty parameter path");
    json updated = document;
    json* node = &updated;
    std::string walked;
    std::size_t pos = 0;
    while (pos <= path.size()) {
        const auto dot = path.find('.', pos);
        std::string segment(path.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos));
        const bool last = dot == std::string_view::npos;
        std::optional<std::size_t> index;
        if (const auto open = segment.find('['); open != std::string::npos) {
            const auto close = segment.find(']', open);
            std::size_t i = 0;
            const auto* first = segment.data() + open + 1;
            const auto* end = segment.data() + (close == std::string::npos ? segment.size() : close);
            if (close == std::string::npos || std::from_chars(first, end, i).ptr != end) {
                throw ConfigError(std::string(path), "malformed index in '" + segment + "'");
            }
            index = i;
            segment = segment.substr(0, open);
        }
        if (segment.empty()) throw ConfigError(std::string(path), "empty path segment");
        walked += (walked.empty() ? "" : ".") + segment;
        if (!node->is_object()) throw ConfigError(walked, "parent is not an object");
        json& child = (*node)[segment];
        if (index) {
            if (!child.is_array() || *index >= child.size()) {
                throw ConfigError(walked + "[" + std::to_string(*index) + "]", "no such array element");
            }
            node = &child[*index];
        } else {
            node = &child;
        }
        if (last) break;
        if (node->is_null()) *node = json::object();
        pos = dot + 1;
    }
    *node = value;
    parse_run_config(updated);
    document = std::move(updated);
}

json parse_scalar(std::string_view s)
{
    if (s == "true") return true;
    if (s == "false") return false;
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec == std::errc() && ptr == end) {
        long long i = 0;
        const auto [iptr, iec] = std::from_chars(s.data(), end, i);
        if (iec == std::errc() && iptr == end) return i;
        return v;
    }
    return std::string(s);
}

namespace {

json term_to_json(const SignalTerm& term, double default_hold)
{
    if (const auto* t = std::get_if<ConstantTerm>(&term)) return {{"type", "constant"}, {"value", t->value}};
    if (const auto* t = std::get_if<SinusoidTerm>(&term)) {
        return {{"type", "sinusoid"},
                {"amplitude", t->amplitude},
                {"frequency", t->angular_frequency},
                {"phase", t->phase},
                {"function", t->kind == SinusoidTerm::Kind::sin ? "sin" : "cos"}};
    }
    const auto& n = std::get<UniformNoiseTerm>(term);
    json out = {{"type", "uniform_noise"}, {"low", n.low}, {"high", n.high}};
    if (n.hold_interval != default_hold) out["hold"] = n.hold_interval;
    return out;
}

}  // namespace

json to_json(const RunConfig& config)
{
    const auto& s = config.scenario;
    const auto& p = s.params;
    json doc;
    doc["model"] = {{"mass", p.mass},
                    {"lead_speed", p.lead_speed},
                    {"f0", p.f0},
                    {"f1", p.f1},
                    {"f2", p.f2},
                    {"min_distance", p.min_distance},
                    {"desired_speed", p.desired_speed},
                    {"disturbance_channels", p.disturbance_channels}};
    doc["initial_state"] = {{"distance", p.initial_distance}, {"speed", p.initial_speed}};
    json controller = {{"type", to_string(s.controller)},
                       {"poles", p.poles},
                       {"k_multiplier", s.k_multiplier},
                       {"r", p.r},
                       {"sigma", p.sigma},
                       {"slack_weight", p.slack_weight},
                       {"control_period", s.control_period}};
    if (s.optimal_k) controller["k"] = "optimal";
    else controller["k"] = p.k;
    if (!s.eta.empty()) controller["eta"] = s.eta;
    if (s.disturbance_bound) controller["disturbance_bound"] = *s.disturbance_bound;
    else controller["disturbance_bound"] = "nominal";
    doc["controller"] = controller;
    json disturbance = {{"seed", s.disturbance.seed}, {"noise_hold", s.control_period}};
    const char* names[] = {"d_u", "d_m"};
    for (std::size_t c = 0; c < 2 && c < s.disturbance.channels.size(); ++c) {
        json terms = json::array();
        for (const auto& term : s.disturbance.channels[c]) terms.push_back(term_to_json(term, s.control_period));
        disturbance[names[c]] = terms;
    }
    doc["disturbance"] = disturbance;
    doc["simulation"] = {{"horizon", s.horizon}, {"substeps", s.substeps}};
    doc["output"] = {{"dir", config.output_dir}, {"plots", config.plots}};
    return doc;
}

}  // namespace drcbf
