#include "dqw/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dqw {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'D', 'Q', 'W', 'D', 'I', 'S', 'T', '1'};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <typename Int>
bool parse_int(std::string_view text, Int& out) {
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool parse_real(std::string_view text, double& out) {
    // from_chars for double is missing from older libstdc++
    std::string copy(text);
    if (copy.empty()) return false;
    char* end = nullptr;
    out = std::strtod(copy.c_str(), &end);
    return end == copy.c_str() + copy.size() && std::isfinite(out);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(trim(text.substr(start, pos == std::string_view::npos ? text.npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string snapshot_token(const SnapshotRequest& r) {
    switch (r.kind) {
        case SnapshotRequest::Kind::first_peak: return "j1";
        case SnapshotRequest::Kind::second_peak: return "j2";
        case SnapshotRequest::Kind::step: break;
    }
    return std::to_string(r.step);
}

void put_u32(std::ostream& os, std::uint32_t v) {
    char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(bytes, 4);
}

std::uint32_t get_u32(const unsigned char* bytes) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    return v;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream os(path, mode | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    return os;
}

void finish(std::ofstream& os, const fs::path& path) {
    os.flush();
    if (!os) throw IoError("write failed for " + path.string());
}

}  // namespace

ParseError::ParseError(int line, std::string key, const std::string& message)
    : ConfigError("config line " + std::to_string(line) + (key.empty() ? "" : ", key '" + key + "'") +
                  ": " + message),
      line_(line),
      key_(std::move(key)) {}

std::string format_shortest(double value) {
    char buffer[40];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, end);
}

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

ExperimentPlan parse_config(std::string_view text) {
    static const std::set<std::string, std::less<>> known = {
        "grid_size",   "steps",        "charge_q", "charge_e",   "mass_mu",  "noise_kind",
        "noise_ratio", "realizations", "seed",     "output_dir", "snapshots"};

    std::map<std::string, std::pair<int, std::string>, std::less<>> entries;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end == text.npos ? text.npos : end - start);
        start = end == text.npos ? text.size() + 1 : end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto colon = line.find(':');
        if (colon == line.npos) throw ParseError(line_no, "", "expected 'key: value'");
        const std::string key(trim(line.substr(0, colon)));
        const std::string value(trim(line.substr(colon + 1)));
        if (!known.contains(key)) throw ParseError(line_no, key, "unknown key");
        if (entries.contains(key)) throw ParseError(line_no, key, "duplicate key");
        entries[key] = {line_no, value};
    }

    const auto get = [&](std::string_view key) -> const std::pair<int, std::string>* {
        const auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    };
    const auto real = [&](std::string_view key, double fallback) {
        const auto* e = get(key);
        if (!e) return fallback;
        double v = 0.0;
        if (!parse_real(e->second, v)) throw ParseError(e->first, std::string(key), "expected a real number");
        return v;
    };

    ExperimentPlan plan;
    const auto* grid = get("grid_size");
    if (!grid) throw ParseError(0, "grid_size", "missing required key");
    int m = 0;
    if (!parse_int(grid->second, m)) throw ParseError(grid->first, "grid_size", "expected an integer");
    if (m < 2) throw ParseError(grid->first, "grid_size", "grid_size must be at least 2");
    if (m % 2 != 0) throw ParseError(grid->first, "grid_size", "grid_size must be even");
    plan.lattice.grid_size = m;
    plan.grid_sizes = {m};

    if (const auto* e = get("steps"); e && e->second != "auto") {
        int steps = 0;
        if (!parse_int(e->second, steps) || steps < 1)
            throw ParseError(e->first, "steps", "expected a positive integer or 'auto'");
        plan.steps = steps;
    }

    plan.lattice.charge_q = real("charge_q", 0.9);
    plan.lattice.charge_e = real("charge_e", -1.0);
    plan.lattice.mass_mu = real("mass_mu", 0.0);

    if (const auto* e = get("noise_kind")) {
        try {
            plan.noise.kind = parse_noise_kind(e->second);
        } catch (const ConfigError& err) {
            throw ParseError(e->first, "noise_kind", err.what());
        }
    }
    plan.noise.ratio = real("noise_ratio", 0.0);
    if (plan.noise.ratio < 0.0)
        throw ParseError(get("noise_ratio")->first, "noise_ratio", "noise_ratio must be non-negative");

    plan.noise.realizations = NoiseSpec::default_realizations(plan.noise.kind);
    if (const auto* e = get("realizations")) {
        if (!parse_int(e->second, plan.noise.realizations) || plan.noise.realizations < 1)
            throw ParseError(e->first, "realizations", "expected a positive integer");
    }
    plan.noise.master_seed = 1;
    if (const auto* e = get("seed")) {
        if (!parse_int(e->second, plan.noise.master_seed))
            throw ParseError(e->first, "seed", "expected an unsigned 64-bit integer");
    }
    if (const auto* e = get("output_dir")) {
        if (e->second.empty()) throw ParseError(e->first, "output_dir", "empty path");
        plan.output_dir = e->second;
    }
    if (const auto* e = get("snapshots"); e && !e->second.empty()) {
        for (auto token : split(e->second, ',')) {
            if (token == "j1") {
                plan.snapshots.push_back(SnapshotRequest::first());
            } else if (token == "j2") {
                plan.snapshots.push_back(SnapshotRequest::second());
            } else {
                int step = 0;
                if (!parse_int(token, step) || step < 0)
                    throw ParseError(e->first, "snapshots", "expected j1, j2 or a step index, got '" +
                                                                std::string(token) + "'");
                plan.snapshots.push_back(SnapshotRequest::at(step));
            }
        }
    }
    return plan;
}

ExperimentPlan load_config(const fs::path& path) { return parse_config(read_text(path)); }

std::string emit_config(const ExperimentPlan& plan) {
    std::ostringstream os;
    os << "grid_size: " << plan.lattice.grid_size << '\n';
    os << "steps: " << (plan.steps ? std::to_string(*plan.steps) : "auto") << '\n';
    os << "charge_q: " << format_shortest(plan.lattice.charge_q) << '\n';
    os << "charge_e: " << format_shortest(plan.lattice.charge_e) << '\n';
    os << "mass_mu: " << format_shortest(plan.lattice.mass_mu) << '\n';
    os << "noise_kind: " << to_string(plan.noise.kind) << '\n';
    os << "noise_ratio: " << format_shortest(plan.noise.ratio) << '\n';
    os << "realizations: " << plan.noise.realizations << '\n';
    os << "seed: " << plan.noise.master_seed << '\n';
    os << "output_dir: " << plan.output_dir << '\n';
    os << "snapshots: ";
    for (std::size_t i = 0; i < plan.snapshots.size(); ++i)
        os << (i ? ", " : "") << snapshot_token(plan.snapshots[i]);
    os << '\n';
    return os.str();
}

json plan_to_json(const ExperimentPlan& plan) {
    json snapshots = json::array();
    for (const auto& s : plan.snapshots) snapshots.push_back(snapshot_token(s));
    return json{{"grid_size", plan.lattice.grid_size},
                {"grid_sizes", plan.grid_sizes},
                {"steps", plan.steps ? json(*plan.steps) : json("auto")},
                {"charge_q", plan.lattice.charge_q},
                {"charge_e", plan.lattice.charge_e},
                {"mass_mu", plan.lattice.mass_mu},
                {"spacing", plan.lattice.spacing},
                {"noise_kind", std::string(to_string(plan.noise.kind))},
                {"noise_ratio", plan.noise.ratio},
                {"realizations", plan.noise.realizations},
                {"seed", plan.noise.master_seed},
                {"output_dir", plan.output_dir},
                {"snapshots", snapshots},
                {"detection", {{"window", plan.detection.window},
                               {"prominence_frac", plan.detection.prominence_frac}}},
                {"horizon", {{"slope", plan.horizon.slope}, {"offset", plan.horizon.offset}}}};
}

json peaks_to_json(const PeakRecord& peaks) {
    const auto peak = [](const std::optional<Peak>& p) {
        return p ? json{{"step", p->step}, {"probability", p->probability}} : json(nullptr);
    };
    return json{{"first", peak(peaks.first)},
                {"second", peak(peaks.second)},
                {"first_absent", !peaks.first.has_value()},
                {"second_absent", !peaks.second.has_value()},
                {"window", peaks.detection.window},
                {"prominence_frac", peaks.detection.prominence_frac}};
}

fs::path sidecar_path(const fs::path& data_file) {
    fs::path out = data_file;
    out.replace_extension(".meta.json");
    return out;
}

void write_sidecar(const fs::path& data_file, std::string_view command, const ExperimentPlan& plan,
                   const json& extra) {
    json meta{{"code_version", std::string(kCodeVersion)},
              {"command", std::string(command)},
              {"data_file", data_file.filename().string()},
              {"config", plan_to_json(plan)},
              {"config_text", emit_config(plan)}};
    if (extra.is_object())
        for (const auto& [key, value] : extra.items()) meta[key] = value;
    write_text(sidecar_path(data_file), meta.dump(2) + "\n");
}

void write_series(const TimeSeries& series, const fs::path& path) {
    auto os = open_out(path);
    os << "j,P\n";
    for (std::size_t j = 0; j < series.probability.size(); ++j)
        os << j << ',' << format_double(series.probability[j]) << '\n';
    finish(os, path);
}

std::vector<double> read_series(const fs::path& path) {
    std::istringstream is(read_text(path));
    std::string line;
    if (!std::getline(is, line) || trim(line) != "j,P") throw IoError(path.string() + ": missing 'j,P' header");
    std::vector<double> values;
    int row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto parts = split(line, ',');
        std::size_t j = 0;
        double p = 0.0;
        if (parts.size() != 2 || !parse_int(parts[0], j) || !parse_real(parts[1], p) || j != values.size())
            throw IoError(path.string() + ": malformed row " + std::to_string(row));
        values.push_back(p);
    }
    return values;
}

void write_distribution(const DistributionSnapshot& snapshot, const fs::path& path, GridFormat format) {
    const int m = snapshot.grid_size;
    if (snapshot.values.size() != static_cast<std::size_t>(m) * m)
        throw ConfigError("snapshot size does not match its grid");
    if (format == GridFormat::text) {
        auto os = open_out(path);
        os << "p,q,d\n";
        for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q) os << p << ',' << q << ',' << format_double(snapshot.at(p, q)) << '\n';
        finish(os, path);
        return;
    }
    auto os = open_out(path, std::ios::out | std::ios::binary);
    os.write(kMagic, sizeof kMagic);
    put_u32(os, static_cast<std::uint32_t>(m));
    put_u32(os, static_cast<std::uint32_t>(snapshot.step));
    for (double d : snapshot.values) {
        const auto bits = std::bit_cast<std::uint64_t>(d);
        char bytes[8];
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
        os.write(bytes, 8);
    }
    finish(os, path);
}

DistributionSnapshot read_distribution(const fs::path& path) {
    const std::string data = read_text(path);
    DistributionSnapshot snapshot;
    if (data.size() >= 16 && std::equal(kMagic, kMagic + 8, data.begin())) {
        const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
        snapshot.grid_size = static_cast<int>(get_u32(bytes + 8));
        snapshot.step = static_cast<int>(get_u32(bytes + 12));
        const std::size_t count = static_cast<std::size_t>(snapshot.grid_size) * snapshot.grid_size;
        if (data.size() != 16 + 8 * count) throw IoError(path.string() + ": truncated binary grid");
        snapshot.values.resize(count);
        for (std::size_t k = 0; k < count; ++k) {
            std::uint64_t bits = 0;
            for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[16 + 8 * k + i]) << (8 * i);
            snapshot.values[k] = std::bit_cast<double>(bits);
        }
        return snapshot;
    }

    std::istringstream is(data);
    std::string line;
    if (!std::getline(is, line) || trim(line) != "p,q,d") throw IoError(path.string() + ": missing 'p,q,d' header");
    std::vector<std::pair<std::pair<int, int>, double>> rows;
    int max_index = -1;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        const auto parts = split(line, ',');
        int p = 0, q = 0;
        double d = 0.0;
        if (parts.size() != 3 || !parse_int(parts[0], p) || !parse_int(parts[1], q) || !parse_real(parts[2], d))
            throw IoError(path.string() + ": malformed row " + std::to_string(rows.size() + 2));
        rows.push_back({{p, q}, d});
        max_index = std::max({max_index, p, q});
    }
    const int m = max_index + 1;
    if (m <= 0 || rows.size() != static_cast<std::size_t>(m) * m)
        throw IoError(path.string() + ": not a square grid");
    snapshot.grid_size = m;
    snapshot.values.assign(rows.size(), 0.0);
    for (const auto& [pq, d] : rows) snapshot.values[static_cast<std::size_t>(pq.first) * m + pq.second] = d;
    // the text form does not carry j; it lives in the sidecar
    const auto meta_file = sidecar_path(path);
    if (fs::exists(meta_file)) {
        const auto meta = json::parse(read_text(meta_file), nullptr, false);
        if (meta.is_object() && meta.contains("step")) snapshot.step = meta["step"].get<int>();
    }
    return snapshot;
}

void write_text(const fs::path& path, std::string_view contents) {
    auto os = open_out(path, std::ios::out | std::ios::binary);
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    finish(os, path);
}

std::string read_text(const fs::path& path) {
    std::ifstream is(path, std::ios::in | std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace dqw
