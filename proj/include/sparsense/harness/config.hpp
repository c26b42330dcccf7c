#pragma once

// Human-readable experiment configs: INI-style sections of `key = value`
// lines. Algorithm sections are written `[algorithm LABEL]` and run in file
// order. Lines starting with '#' or ';' are comments.
//
// With `normalization = unitary` in [experiment], step sizes and penalty
// parameters are read in the convention of a unitary IDFT (regressor entries
// of magnitude 1/sqrt(N)) and converted to the library's unit-magnitude
// regressors; the two runs produce identical r-MSE trajectories.

#include "sparsense/harness/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sparsense {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfigSection {
    std::string name;     ///< "experiment", "signal", "sensing", "algorithm"
    std::string argument; ///< label for algorithm sections
    std::vector<std::pair<std::string, std::string>> entries;

    std::optional<std::string> get(std::string_view key) const {
        for (const auto& [k, v] : entries)
            if (k == key) return v;
        return std::nullopt;
    }

    void set(const std::string& key, std::string value) {
        for (auto& [k, v] : entries)
            if (k == key) {
                v = std::move(value);
                return;
            }
        entries.emplace_back(key, std::move(value));
    }
};

struct ConfigDocument {
    std::vector<ConfigSection> sections;

    const ConfigSection* find(std::string_view name) const {
        for (const auto& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    }

    ConfigSection* find(std::string_view name) {
        for (auto& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // Prefer the shortest representation that round-trips.
    for (int prec = 1; prec <= 17; ++prec) {
        char shorter[32];
        std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
        if (std::strtod(shorter, nullptr) == v) return shorter;
    }
    return buf;
}

} // namespace detail

inline ConfigDocument parse_config(std::string_view text) {
    ConfigDocument doc;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        const auto raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        const std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section");
            const std::string inner = detail::trim(std::string_view(line).substr(1, line.size() - 2));
            ConfigSection section;
            const auto space = inner.find_first_of(" \t");
            section.name = inner.substr(0, space);
            if (space != std::string::npos) section.argument = detail::trim(std::string_view(inner).substr(space));
            doc.sections.push_back(std::move(section));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        if (doc.sections.empty()) throw ConfigError("line " + std::to_string(line_no) + ": entry outside a section");
        doc.sections.back().entries.emplace_back(detail::trim(std::string_view(line).substr(0, eq)),
                                                 detail::trim(std::string_view(line).substr(eq + 1)));
    }
    return doc;
}

inline std::string dump_config(const ConfigDocument& doc) {
    std::ostringstream out;
    for (std::size_t i = 0; i < doc.sections.size(); ++i) {
        const auto& s = doc.sections[i];
        if (i) out << '\n';
        out << '[' << s.name;
        if (!s.argument.empty()) out << ' ' << s.argument;
        out << "]\n";
        for (const auto& [k, v] : s.entries) out << k << " = " << v << '\n';
    }
    return out.str();
}

namespace detail {

inline double parse_double(const std::string& where, const std::string& text) {
    if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size()) throw ConfigError(where + ": not a number: '" + text + "'");
    return v;
}

inline std::uint64_t parse_uint(const std::string& where, const std::string& text) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError(where + ": not a nonnegative integer: '" + text + "'");
    return v;
}

inline bool parse_bool(const std::string& where, const std::string& text) {
    if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "off" || text == "no") return false;
    throw ConfigError(where + ": not a boolean: '" + text + "'");
}

/// Burn-in lengths may be absolute ("400") or multiples of M ("2M", "M").
inline std::size_t parse_burn_in(const std::string& where, const std::string& text, std::size_t M) {
    if (!text.empty() && (text.back() == 'M' || text.back() == 'm')) {
        const std::string factor = text.substr(0, text.size() - 1);
        const double f = factor.empty() ? 1.0 : parse_double(where, factor);
        if (f < 0) throw ConfigError(where + ": negative burn-in");
        return static_cast<std::size_t>(std::llround(f * static_cast<double>(M)));
    }
    return parse_uint(where, text);
}

inline std::vector<std::size_t> parse_uint_list(const std::string& where, const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_uint(where, item));
    }
    return out;
}

class SectionReader {
public:
    SectionReader(const ConfigSection& s) : section_(s) {
        where_ = "[" + s.name + (s.argument.empty() ? "" : " " + s.argument) + "]";
    }

    std::optional<std::string> raw(std::string_view key) const { return section_.get(key); }

    std::string text(std::string_view key) const {
        auto v = raw(key);
        if (!v) throw ConfigError(where_ + ": missing key '" + std::string(key) + "'");
        return *v;
    }

    double number(std::string_view key) const { return parse_double(at(key), text(key)); }
    double number(std::string_view key, double fallback) const {
        auto v = raw(key);
        return v ? parse_double(at(key), *v) : fallback;
    }
    std::uint64_t integer(std::string_view key) const { return parse_uint(at(key), text(key)); }
    std::uint64_t integer(std::string_view key, std::uint64_t fallback) const {
        auto v = raw(key);
        return v ? parse_uint(at(key), *v) : fallback;
    }
    bool flag(std::string_view key, bool fallback) const {
        auto v = raw(key);
        return v ? parse_bool(at(key), *v) : fallback;
    }
    std::string at(std::string_view key) const { return where_ + " " + std::string(key); }

private:
    const ConfigSection& section_;
    std::string where_;
};

/// Rejects keys outside `allowed`, so a typo does not silently fall back to
/// a default.
inline void check_keys(const ConfigSection& s, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : s.entries)
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("[" + s.name + (s.argument.empty() ? "" : " " + s.argument) + "]: unknown key '" + key +
                              "'");
}

} // namespace detail

/// Command-line overrides applied while loading.
struct LoadOptions {
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    /// Replace N; M and numeric burn-in lengths scale proportionally.
    std::optional<std::size_t> scale_N;
};

inline ExperimentSpec load_experiment(const ConfigDocument& doc, const LoadOptions& options = {}) {
    using detail::SectionReader;
    const auto* exp_s = doc.find("experiment");
    const auto* sig_s = doc.find("signal");
    const auto* sen_s = doc.find("sensing");
    if (!exp_s || !sig_s || !sen_s) throw ConfigError("config needs [experiment], [signal] and [sensing] sections");
    const SectionReader exp(*exp_s), sig(*sig_s), sen(*sen_s);
    detail::check_keys(*exp_s, {"name", "trials", "seed", "aggregation", "normalization", "sweep_M"});
    detail::check_keys(*sig_s, {"N", "k", "amplitude", "snr_db", "bins", "change_window", "extra_k"});
    detail::check_keys(*sen_s, {"M", "mode", "passes", "windows"});
    for (const auto& section : doc.sections)
        if (section.name != "experiment" && section.name != "signal" && section.name != "sensing" &&
            section.name != "algorithm")
            throw ConfigError("unknown section [" + section.name + "]");

    ExperimentSpec spec;
    spec.name = exp.text("name");
    spec.trials = exp.integer("trials", 1);
    spec.seed = exp.integer("seed", 1);
    const std::string aggregation = exp.raw("aggregation").value_or("linear");
    if (aggregation == "linear") spec.aggregation = Aggregation::MeanLinear;
    else if (aggregation == "db") spec.aggregation = Aggregation::MeanDb;
    else throw ConfigError(exp.at("aggregation") + ": expected 'linear' or 'db'");
    if (auto sweep = exp.raw("sweep_M")) {
        for (std::size_t m : detail::parse_uint_list(exp.at("sweep_M"), *sweep)) spec.sweep_M.push_back(m);
    }
    const std::string normalization = exp.raw("normalization").value_or("unit");
    if (normalization != "unit" && normalization != "unitary")
        throw ConfigError(exp.at("normalization") + ": expected 'unit' or 'unitary'");
    const bool unitary = normalization == "unitary";

    const std::size_t N0 = sig.integer("N");
    const std::size_t N = options.scale_N.value_or(N0);
    if (N < 4) throw ConfigError("N must be at least 4");
    const double ratio = static_cast<double>(N) / static_cast<double>(N0);
    const auto scaled = [&](std::size_t v) {
        return options.scale_N ? static_cast<std::size_t>(std::llround(static_cast<double>(v) * ratio)) : v;
    };

    spec.signal.N = N;
    spec.signal.k = sig.integer("k");
    spec.signal.amplitude = sig.number("amplitude", 1.0);
    spec.signal.snr_db = sig.number("snr_db", std::numeric_limits<double>::infinity());
    if (auto bins = sig.raw("bins")) spec.signal.bins = detail::parse_uint_list(sig.at("bins"), *bins);
    spec.signal.change_window = sig.integer("change_window", 0);
    spec.signal.extra_k = sig.integer("extra_k", 0);

    spec.sensing.N = N;
    spec.sensing.M = std::max<std::size_t>(1, scaled(sen.integer("M")));
    const std::string mode = sen.raw("mode").value_or("repeated");
    if (mode == "repeated") spec.sensing.mode = RepeatedPass{sen.integer("passes")};
    else if (mode == "windowed") spec.sensing.mode = Windowed{sen.integer("windows")};
    else throw ConfigError(sen.at("mode") + ": expected 'repeated' or 'windowed'");

    const double n = static_cast<double>(N);
    const double root_n = std::sqrt(n);
    for (const auto& section : doc.sections) {
        if (section.name != "algorithm") continue;
        const SectionReader alg(section);
        detail::check_keys(section, {"variant", "mu", "rho", "beta", "epsilon", "s", "burn_in", "lambda", "xi",
                                     "q_star", "support_from_test"});
        if (section.argument.empty()) throw ConfigError("[algorithm] section needs a label");
        AlgorithmEntry entry;
        entry.label = section.argument;
        auto& c = entry.config;
        try {
            c.variant = parse_variant(alg.text("variant"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(alg.at("variant") + ": " + e.what());
        }
        c.mu = alg.number("mu");
        c.rho = alg.number("rho", 0.0);
        c.beta = alg.number("beta", 0.0);
        c.epsilon = alg.number("epsilon", 1.0);
        if (unitary) {
            c.mu /= n;
            c.rho /= root_n;
            c.beta *= root_n;
            c.epsilon *= root_n;
        }
        if (auto s = alg.raw("s")) {
            if (*s == "adaptive") c.s = AdaptiveBudget{};
            else c.s = static_cast<std::size_t>(detail::parse_uint(alg.at("s"), *s));
        }
        if (auto b = alg.raw("burn_in")) {
            const bool relative = !b->empty() && (b->back() == 'M' || b->back() == 'm');
            const std::size_t raw_len = detail::parse_burn_in(alg.at("burn_in"), *b, spec.sensing.M);
            c.burn_in = relative ? raw_len : scaled(raw_len);
            if (relative) {
                const std::string factor = b->substr(0, b->size() - 1);
                entry.burn_in_per_M = factor.empty() ? 1.0 : detail::parse_double(alg.at("burn_in"), factor);
            }
        }
        if (alg.raw("lambda") || alg.raw("xi") || alg.raw("q_star")) {
            TrackerParams t;
            t.lambda = alg.number("lambda", t.lambda);
            t.xi = alg.number("xi", t.xi);
            if (unitary) t.xi /= n;
            t.q_star = alg.number("q_star", t.q_star);
            t.support_from_test = alg.flag("support_from_test", false);
            entry.tracker = t;
        }
        spec.algorithms.push_back(std::move(entry));
    }

    if (options.scale_N)
        for (auto& m : spec.sweep_M) m = std::clamp<std::size_t>(scaled(m), 1, N);

    if (options.trials) spec.trials = *options.trials;
    if (options.seed) spec.seed = *options.seed;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid experiment: ") + e.what());
    }
    return spec;
}

inline ExperimentSpec load_experiment(std::string_view text, const LoadOptions& options = {}) {
    return load_experiment(parse_config(text), options);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Serializes a spec in library units (normalization = unit).
inline ConfigDocument to_document(const ExperimentSpec& spec) {
    using detail::format_double;
    ConfigDocument doc;
    ConfigSection exp{"experiment", "", {}};
    exp.set("name", spec.name);
    exp.set("trials", std::to_string(spec.trials));
    exp.set("seed", std::to_string(spec.seed));
    exp.set("aggregation", spec.aggregation == Aggregation::MeanLinear ? "linear" : "db");
    exp.set("normalization", "unit");
    if (!spec.sweep_M.empty()) {
        std::string list;
        for (std::size_t i = 0; i < spec.sweep_M.size(); ++i) list += (i ? ", " : "") + std::to_string(spec.sweep_M[i]);
        exp.set("sweep_M", list);
    }
    doc.sections.push_back(exp);

    ConfigSection sig{"signal", "", {}};
    sig.set("N", std::to_string(spec.signal.N));
    sig.set("k", std::to_string(spec.signal.k));
    sig.set("amplitude", format_double(spec.signal.amplitude));
    sig.set("snr_db", format_double(spec.signal.snr_db));
    if (!spec.signal.bins.empty()) {
        std::string list;
        for (std::size_t i = 0; i < spec.signal.bins.size(); ++i)
            list += (i ? ", " : "") + std::to_string(spec.signal.bins[i]);
        sig.set("bins", list);
    }
    if (spec.signal.has_change()) {
        sig.set("change_window", std::to_string(spec.signal.change_window));
        sig.set("extra_k", std::to_string(spec.signal.extra_k));
    }
    doc.sections.push_back(sig);

    ConfigSection sen{"sensing", "", {}};
    sen.set("M", std::to_string(spec.sensing.M));
    if (spec.sensing.windowed()) {
        sen.set("mode", "windowed");
        sen.set("windows", std::to_string(spec.sensing.windows()));
    } else {
        sen.set("mode", "repeated");
        sen.set("passes", std::to_string(spec.sensing.passes()));
    }
    doc.sections.push_back(sen);

    for (const auto& a : spec.algorithms) {
        ConfigSection alg{"algorithm", a.label, {}};
        const auto& c = a.config;
        alg.set("variant", std::string(to_string(c.variant)));
        alg.set("mu", format_double(c.mu));
        if (c.rho != 0.0) alg.set("rho", format_double(c.rho));
        if (c.beta != 0.0) alg.set("beta", format_double(c.beta));
        if (c.epsilon != 1.0) alg.set("epsilon", format_double(c.epsilon));
        if (c.adaptive()) alg.set("s", "adaptive");
        else if (std::get<std::size_t>(c.s) != 0) alg.set("s", std::to_string(std::get<std::size_t>(c.s)));
        if (a.burn_in_per_M) alg.set("burn_in", format_double(*a.burn_in_per_M) + "M");
        else if (c.burn_in) alg.set("burn_in", std::to_string(c.burn_in));
        if (a.tracker) {
            alg.set("lambda", format_double(a.tracker->lambda));
            alg.set("xi", format_double(a.tracker->xi));
            alg.set("q_star", format_double(a.tracker->q_star));
            if (a.tracker->support_from_test) alg.set("support_from_test", "true");
        }
        doc.sections.push_back(alg);
    }
    return doc;
}

} // namespace sparsense
