#include "tdmasim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <span>
#include <sstream>
#include <thread>

#include "tdmasim/analysis.hpp"

namespace tdma {

Topology make_topology(const std::string& spec, std::uint64_t seed) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "grid") {
        const auto x = arg.find('x');
        if (x == std::string::npos) throw ConfigError("grid spec needs WxH: '" + spec + "'");
        return Topology::grid(static_cast<std::uint32_t>(std::stoul(arg.substr(0, x))),
                              static_cast<std::uint32_t>(std::stoul(arg.substr(x + 1))));
    }
    if (kind == "star") {
        return Topology::star(static_cast<std::uint32_t>(std::stoul(arg)));
    }
    if (kind == "unit_disk") {
        std::uint32_t n = 0;
        double radius = 1.5;
        double side = 0.0;
        std::stringstream ss(arg);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw ConfigError("unit_disk spec: expected key=value, got '" + item + "'");
            const std::string key = item.substr(0, eq);
            const std::string val = item.substr(eq + 1);
            if (key == "n") n = static_cast<std::uint32_t>(std::stoul(val));
            else if (key == "r") radius = std::stod(val);
            else if (key == "side") side = std::stod(val);
            else throw ConfigError("unit_disk spec: unknown key '" + key + "'");
        }
        if (n == 0) throw ConfigError("unit_disk spec: missing n");
        if (side == 0.0) side = std::sqrt(double(n));
        Rng rng(seed ^ 0x746f706fULL);
        return Topology::unit_disk(n, radius, side, rng);
    }
    if (kind == "file") {
        std::ifstream in(arg);
        if (!in) throw ConfigError("cannot open topology file '" + arg + "'");
        return Topology::from_edge_list(in);
    }
    throw ConfigError("unknown topology spec '" + spec + "'");
}

SimConfig ExperimentEntry::to_config(std::uint64_t seed) const {
    SimConfig cfg;
    cfg.topology = make_topology(topology, seed);
    cfg.topology_name = topology;
    cfg.slots = slots;
    cfg.clock_modulus = clock_modulus;
    cfg.time_out = time_out;
    cfg.omission = OmissionPolicy::parse(omission);
    cfg.seed = seed;
    cfg.max_frames = max_frames;
    cfg.jitter = jitter;
    cfg.initial = initial;
    if (fault_frame)
        cfg.fault = FaultSpec::parse_scope(*fault_frame, fault_scope);
    return cfg;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

struct TomlValue {
    std::string raw;

    std::string as_string(int line_no) const {
        if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"')
            return raw.substr(1, raw.size() - 2);
        throw ParseError("line " + std::to_string(line_no) + ": expected a string, got " + raw);
    }

    std::uint64_t as_uint(int line_no) const {
        try {
            std::size_t pos = 0;
            const auto v = std::stoull(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(line_no) + ": expected an integer, got " + raw);
        }
    }

    bool as_bool(int line_no) const {
        if (raw == "true") return true;
        if (raw == "false") return false;
        throw ParseError("line " + std::to_string(line_no) + ": expected true/false, got " + raw);
    }

    std::vector<std::uint64_t> as_uint_array(int line_no) const {
        if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']')
            throw ParseError("line " + std::to_string(line_no) + ": expected an array, got " + raw);
        std::vector<std::uint64_t> out;
        std::stringstream ss(raw.substr(1, raw.size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            out.push_back(TomlValue{item}.as_uint(line_no));
        }
        return out;
    }
};

} // namespace

ExperimentSpec parse_spec(std::istream& in) {
    ExperimentSpec spec;
    ExperimentEntry* current = nullptr;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line == "[[experiment]]") {
            spec.entries.emplace_back();
            current = &spec.entries.back();
            continue;
        }
        if (line.front() == '[')
            throw ParseError("line " + std::to_string(line_no) +
                             ": only [[experiment]] tables are supported");
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const TomlValue value{trim(line.substr(eq + 1))};

        if (!current) {
            if (key == "output") spec.output = value.as_string(line_no);
            else throw ParseError("line " + std::to_string(line_no) +
                                  ": unknown top-level key '" + key + "'");
            continue;
        }

        ExperimentEntry& e = *current;
        if (key == "name") e.name = value.as_string(line_no);
        else if (key == "topology") e.topology = value.as_string(line_no);
        else if (key == "xi") e.slots.xi = value.as_uint(line_no);
        else if (key == "tau") e.slots.tau = value.as_uint(line_no);
        else if (key == "seeds") {
            if (!value.raw.empty() && value.raw.front() == '[') {
                e.seeds = value.as_uint_array(line_no);
            } else {
                const auto n = value.as_uint(line_no);
                e.seeds.clear();
                for (std::uint64_t s = 1; s <= n; ++s) e.seeds.push_back(s);
            }
            if (e.seeds.empty())
                throw ParseError("line " + std::to_string(line_no) + ": seeds must be non-empty");
        } else if (key == "max_frames") e.max_frames = value.as_uint(line_no);
        else if (key == "initial") e.initial = parse_initial_condition(value.as_string(line_no));
        else if (key == "jitter") e.jitter = value.as_uint(line_no);
        else if (key == "omission") e.omission = value.as_string(line_no);
        else if (key == "clock_modulus") e.clock_modulus = value.as_uint(line_no);
        else if (key == "time_out") e.time_out = value.as_uint(line_no);
        else if (key == "expect_nonconvergence") e.expect_nonconvergence = value.as_bool(line_no);
        else if (key == "fault_frame") e.fault_frame = value.as_uint(line_no);
        else if (key == "fault_scope") e.fault_scope = value.as_string(line_no);
        else throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (spec.entries.empty()) throw ParseError("spec contains no [[experiment]] tables");
    for (const auto& e : spec.entries) {
        // Fail on malformed entries before any run starts.
        e.to_config(e.seeds.front()).validate();
    }
    return spec;
}

ExperimentSpec parse_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open spec file '" + path + "'");
    return parse_spec(in);
}

namespace {

std::size_t worker_count(std::size_t jobs) {
    std::size_t cap = std::thread::hardware_concurrency();
    if (cap == 0) cap = 1;
    if (const char* env = std::getenv("TDMASIM_JOBS")) {
        const auto v = std::strtoul(env, nullptr, 10);
        if (v >= 1) cap = v;
    }
    return std::min(cap, std::max<std::size_t>(jobs, 1));
}

RunResult run_one(const ExperimentEntry& entry, std::uint64_t seed) {
    const SimConfig cfg = entry.to_config(seed);
    const Trace trace = run(cfg);
    const auto conv = analysis::convergence_frame(trace, cfg.topology);

    RunResult r;
    r.name = entry.name.empty() ? entry.topology : entry.name;
    r.topology = entry.topology;
    r.nodes = cfg.topology.node_count();
    r.slots = cfg.slots;
    r.seed = seed;
    r.max_frames = cfg.max_frames;
    r.converged = conv.has_value();
    r.convergence_frame = conv.value_or(0);
    r.collisions_total = analysis::collision_count(trace, 0, cfg.max_frames);
    r.collisions_post = conv ? analysis::collision_count(trace, *conv, cfg.max_frames) : 0;
    r.expected = entry.expect_nonconvergence ? !r.converged : r.converged;
    return r;
}

void append_csv(std::ostringstream& csv, const RunResult& r) {
    csv << "run," << r.topology << ',' << r.nodes << ',' << r.slots.xi << ','
        << r.slots.tau << ',' << r.seed << ',' << r.max_frames << ','
        << (r.converged ? 1 : 0) << ',';
    if (r.converged) csv << r.convergence_frame;
    csv << ',' << r.collisions_total << ',';
    if (r.converged) csv << r.collisions_post;
    csv << '\n';
}

void append_summary(std::ostringstream& csv, const ExperimentEntry& entry,
                    std::span<const RunResult> runs) {
    std::uint64_t converged = 0, cmin = 0, cmax = 0;
    double mean = 0.0;
    for (const auto& r : runs) {
        if (!r.converged) continue;
        if (converged == 0) {
            cmin = cmax = r.convergence_frame;
        } else {
            cmin = std::min(cmin, r.convergence_frame);
            cmax = std::max(cmax, r.convergence_frame);
        }
        mean += double(r.convergence_frame);
        ++converged;
    }
    if (converged > 0) mean /= double(converged);
    // Summary rows reuse the trailing columns as mean/min/max convergence
    // frames; the seed column stays empty.
    csv << "summary," << entry.topology << ',' << runs.front().nodes << ','
        << entry.slots.xi << ',' << entry.slots.tau << ",,"
        << entry.max_frames << ',' << converged << '/' << runs.size() << ',';
    if (converged > 0) {
        csv << std::fixed << std::setprecision(2) << mean;
        csv.unsetf(std::ios::fixed);
        csv << ',' << cmin << ',' << cmax;
    } else {
        csv << ",,";
    }
    csv << '\n';
}

} // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec) {
    struct Job {
        std::size_t entry;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t e = 0; e < spec.entries.size(); ++e)
        for (std::uint64_t seed : spec.entries[e].seeds) jobs.push_back({e, seed});

    ExperimentReport report;
    for (const auto& entry : spec.entries) {
        const auto warns = entry.to_config(entry.seeds.front()).validation_warnings();
        for (const auto& w : warns)
            report.warnings.push_back((entry.name.empty() ? entry.topology : entry.name) +
                                      ": " + w);
    }

    std::vector<RunResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error;
    std::mutex error_mutex;

    auto work = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size() || failed.load()) break;
            try {
                results[k] = run_one(spec.entries[jobs[k].entry], jobs[k].seed);
            } catch (const std::exception& ex) {
                std::lock_guard<std::mutex> lock(error_mutex);
                error = ex.what();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t workers = worker_count(jobs.size());
    for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failed.load()) throw ConfigError(error);

    std::ostringstream csv;
    csv << "row,topology,n,xi,tau,seed,frames,converged,convergence_frame,"
           "collisions_total,collisions_post_convergence\n";
    std::size_t cursor = 0;
    for (std::size_t e = 0; e < spec.entries.size(); ++e) {
        const std::size_t count = spec.entries[e].seeds.size();
        const std::span<const RunResult> batch(results.data() + cursor, count);
        for (const auto& r : batch) {
            append_csv(csv, r);
            if (!r.expected) report.all_expected = false;
        }
        append_summary(csv, spec.entries[e], batch);
        cursor += count;
    }
    report.runs = std::move(results);
    report.csv = csv.str();
    return report;
}

ExperimentReport sweep(const std::string& family, const std::string& sizes,
                       std::uint64_t seed_count, std::uint64_t tau) {
    if (family != "grid" && family != "unit_disk")
        throw ConfigError("sweep: family must be 'grid' or 'unit_disk'");
    if (seed_count == 0) throw ConfigError("sweep: need at least one seed");

    std::vector<std::string> items;
    std::stringstream ss(sizes);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    if (items.empty()) throw ConfigError("sweep: empty size list");

    ExperimentSpec spec;
    for (const auto& size : items) {
        ExperimentEntry e;
        if (family == "grid") {
            e.topology = "grid:" + size;
            e.slots = {20, tau != 0 ? tau : 16};
        } else {
            e.topology = "unit_disk:n=" + size;
            e.slots = {20, tau != 0 ? tau : 64};
        }
        e.seeds.clear();
        for (std::uint64_t s = 1; s <= seed_count; ++s) e.seeds.push_back(s);
        e.max_frames = 2000;
        e.initial = InitialCondition::RandomClocks;
        spec.entries.push_back(std::move(e));
    }
    for (const auto& e : spec.entries) e.to_config(e.seeds.front()).validate();
    return run_experiment(spec);
}

namespace {

CheckResult check(const std::string& name, bool ok, const std::string& detail = "") {
    return {name, ok, detail};
}

} // namespace

std::vector<CheckResult> self_check() {
    std::vector<CheckResult> out;
    Rng rng(0x5eedULL);

    // Clock algebra: advance composes additively, and the windowed order
    // agrees with an unbounded counter through a wrap, exhaustively at c=64.
    {
        bool ok = true;
        const Tick c = 64;
        for (Tick v = 0; v < c && ok; ++v)
            for (Tick x = 0; x < c && ok; ++x)
                for (Tick y = 0; y < c && ok; ++y)
                    if (advance(advance(ModularClock{v, c}, x), y).value != (v + x + y) % c)
                        ok = false;
        for (std::uint64_t truth_a = 0; truth_a < 3 * c && ok; ++truth_a) {
            for (std::uint64_t truth_b = truth_a > c / 2 ? truth_a - c / 2 + 1 : 0;
                 truth_b < truth_a + c / 2 && ok; ++truth_b) {
                const bool expect = truth_b > truth_a;
                if (strictly_newer(truth_a % c, truth_b % c, c) != expect) ok = false;
            }
        }
        out.push_back(check("clock-algebra", ok));
    }

    // Interval coverage bound (1000 randomized instances plus tightness).
    {
        bool ok = true;
        bool tight = false;
        for (int k = 0; k < 1000; ++k) {
            const double xi = std::vector<double>{1, 5, 20}[rng.uniform(0, 2)];
            const std::uint64_t tau = rng.uniform(0, 1) ? 4 : 16;
            const std::size_t m = rng.uniform(1, 10);
            std::vector<double> starts(m);
            for (auto& b : starts)
                b = rng.unit() * xi * double(tau + 1) - xi;
            const auto res = analysis::interval_coverage_bound(starts, xi, tau);
            if (res.intersected > res.bound) ok = false;
            if (res.intersected == res.bound) tight = true;
        }
        out.push_back(check("coverage-bound", ok && tight,
                            tight ? "" : "no tightness witness found"));
    }

    // used_slots against a tick-by-tick coverage oracle.
    {
        bool ok = true;
        for (int k = 0; k < 300 && ok; ++k) {
            const Tick xi = std::vector<Tick>{1, 5, 20}[rng.uniform(0, 2)];
            const Tick tau = rng.uniform(0, 1) ? 4 : 16;
            const SlotParams p{xi, tau};
            const Tick c = xi * tau * 64;
            FrameInfoSet fi;
            fi.time_out = c / 4;
            const std::size_t m = rng.uniform(0, 8);
            for (std::size_t e = 0; e < m; ++e)
                fi.entries.push_back({static_cast<NodeId>(e), EntryKind::Msg,
                                      Occurrence::Local, rng.uniform(0, c - 1)});
            SlotSet oracle;
            for (const auto& e : fi.entries)
                for (Tick t = 0; t < xi; ++t) {
                    const Tick tick = (e.rx_time + t) % c;
                    oracle.insert(tick / xi % tau);   // first-principles slot number
                }
            if (used_slots(fi, p, c) != oracle) ok = false;
            if (used_slots(fi, p, c).size() > 2 * fi.entries.size()) ok = false;
        }
        out.push_back(check("used-slots-oracle", ok));
    }

    // Closure: from a constructed safe configuration nothing ever breaks.
    {
        SimConfig cfg;
        cfg.topology = Topology::grid(3, 3);
        cfg.topology_name = "grid:3x3";
        cfg.slots = {20, 16};
        cfg.seed = 11;
        cfg.max_frames = 60;
        cfg.initial = InitialCondition::Safe;
        const Trace trace = run(cfg);
        bool legal = true;
        for (const auto& snap : trace.snapshots)
            if (!analysis::is_legal(snap, cfg.topology)) legal = false;
        const bool no_collisions = analysis::collision_count(trace, 0, cfg.max_frames) == 0;
        out.push_back(check("closure", legal && no_collisions,
                            legal ? (no_collisions ? "" : "collisions seen") : "legality broken"));
    }

    // The blocking star: the center is never heard, no convergence.
    {
        SimConfig cfg;
        cfg.topology = Topology::star(5);
        cfg.topology_name = "star:5";
        cfg.slots = {20, 9};
        cfg.seed = 3;
        cfg.max_frames = 25;
        cfg.initial = InitialCondition::Lemma1Blocker;
        const Trace trace = run(cfg);
        const NodeId center = 5;
        std::uint64_t attempts = 0, delivered = 0;
        for (const auto& tx : trace.transmissions) {
            if (tx.sender != center) continue;
            ++attempts;
            for (const auto& o : tx.outcomes)
                if (o.delivered) ++delivered;
        }
        const bool blocked = attempts > 0 && delivered == 0;
        const bool no_conv = !analysis::convergence_frame(trace, cfg.topology).has_value();
        out.push_back(check("lemma1-blocker", blocked && no_conv,
                            "center attempts=" + std::to_string(attempts) +
                                " delivered=" + std::to_string(delivered)));
    }

    // Self-stabilization: full corruption, then recovery.
    {
        SimConfig cfg;
        cfg.topology = Topology::grid(3, 3);
        cfg.topology_name = "grid:3x3";
        cfg.slots = {20, 16};
        cfg.seed = 21;
        cfg.max_frames = 500;
        cfg.initial = InitialCondition::Safe;
        cfg.fault = FaultSpec{10, FaultScope::All, 0, 0};
        const Trace trace = run(cfg);
        const auto conv = analysis::convergence_frame(trace, cfg.topology);
        const bool ok = conv.has_value() && *conv > 10 && *conv <= 410;
        out.push_back(check("fault-recovery", ok,
                            conv ? "reconverged at frame " + std::to_string(*conv)
                                 : "no reconvergence"));
    }

    // Replay determinism.
    {
        SimConfig cfg;
        cfg.topology = Topology::grid(3, 2);
        cfg.topology_name = "grid:3x2";
        cfg.slots = {20, 16};
        cfg.seed = 77;
        cfg.max_frames = 120;
        cfg.initial = InitialCondition::RandomClocks;
        cfg.record_events = true;
        const auto d1 = run(cfg).digest();
        const auto d2 = run(cfg).digest();
        out.push_back(check("replay-determinism", d1 == d2));
    }

    return out;
}

} // namespace tdma
