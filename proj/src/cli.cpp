#include "survey/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace survey {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw std::runtime_error("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(std::string s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

Rational parse_rat(const std::string& text, std::size_t line) {
    auto r = parse_rational(text);
    if (!r) fail(line, "expected a rational, got '" + text + "'");
    return *r;
}

unsigned long parse_uint(const std::string& text, std::size_t line) {
    Rational r = parse_rat(text, line);
    if (r.get_den() != 1 || sgn(r) < 0 || r.get_num() > 1000000000000UL)
        fail(line, "expected a nonnegative integer, got '" + text + "'");
    return r.get_num().get_ui();
}

bool parse_bool(const std::string& text, std::size_t line) {
    if (text == "true") return true;
    if (text == "false") return false;
    fail(line, "expected true or false, got '" + text + "'");
}

// "[(a, b), (c, d), ...]" -> list of raw (first, rest-of-tuple) pairs; the
// second component may itself contain commas (star skeleton radii).
std::vector<std::pair<std::string, std::string>> parse_tuples(const std::string& text, std::size_t line) {
    std::string s = trim(text);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') fail(line, "expected a [...] list");
    s = s.substr(1, s.size() - 2);
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
        if (i >= s.size()) break;
        if (s[i] != '(') fail(line, "expected '(' in list");
        std::size_t close = s.find(')', i);
        if (close == std::string::npos) fail(line, "unbalanced '(' in list");
        std::string tuple = s.substr(i + 1, close - i - 1);
        std::size_t comma = tuple.find(',');
        if (comma == std::string::npos) fail(line, "expected a (a, b) pair");
        out.emplace_back(trim(tuple.substr(0, comma)), trim(tuple.substr(comma + 1)));
        i = close + 1;
    }
    if (out.empty()) fail(line, "empty list");
    return out;
}

DegreeDistribution parse_degree(const std::string& text, std::size_t line) {
    DegreeDistribution deg;
    for (const auto& [d, p] : parse_tuples(text, line))
        deg.atoms.emplace_back(static_cast<unsigned>(parse_uint(d, line)), parse_rat(p, line));
    try {
        deg.validate();
    } catch (const std::exception& e) {
        fail(line, e.what());
    }
    return deg;
}

std::string rat_str(const Rational& r) {
    return r.get_den() == 1 ? r.get_num().get_str() : r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string degree_str(const DegreeDistribution& deg) {
    std::string s = "[";
    for (std::size_t i = 0; i < deg.atoms.size(); ++i) {
        if (i) s += ", ";
        s += "(" + std::to_string(deg.atoms[i].first) + ", " + rat_str(deg.atoms[i].second) + ")";
    }
    return s + "]";
}

// Truncated (not rounded) decimal with `digits` places, for values in [0, 1);
// matches how published threshold tables cut irrational entries.
std::string decimal_floor(const Rational& r, int digits) {
    Integer scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    Integer k = r.get_num() * scale / r.get_den();
    std::string d = k.get_str();
    while (static_cast<int>(d.size()) < digits) d.insert(d.begin(), '0');
    return "0." + d;
}

SkeletonPtr resolve_skeleton(const std::string& spec, std::size_t q, const SymmetryGroup& group) {
    std::size_t colon = spec.find(':');
    std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
    std::string arg = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
    if (kind == "grid") {
        unsigned long m = parse_uint(arg, 0);
        if (m == 0) throw std::runtime_error("skeleton 'grid' needs a positive denominator");
        return std::make_shared<Skeleton>(make_grid_skeleton(q, static_cast<unsigned>(m)));
    }
    if (kind == "star") {
        std::vector<Rational> radii;
        std::stringstream ss(arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) radii.push_back(parse_rat(tok, 0));
        return std::make_shared<Skeleton>(make_star_skeleton(q, radii));
    }
    if (kind == "file") return std::make_shared<Skeleton>(load_skeleton_file(arg, group));
    throw std::runtime_error("unknown skeleton spec '" + spec + "' (expected grid:m, star:r1,..., or file:path)");
}

std::ofstream open_out(const std::string& out_dir, const std::string& name, const RunConfig& config) {
    std::filesystem::create_directories(out_dir);
    std::string path = out_dir + "/" + name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    out << "# config " << config_hash(config) << "\n";
    return out;
}

}  // namespace

void RunConfig::validate() const {
    if (q < 2) throw std::invalid_argument("config: q must be >= 2");
    if (lambda < Rational(-1, static_cast<long>(q - 1)) || lambda > 1)
        throw std::invalid_argument("config: lambda outside [-1/(q-1), 1]");
    degree.validate();
    if (subintervals == 0) throw std::invalid_argument("config: subintervals must be >= 1");
    for (const auto& row : table_rows) row.validate();
}

RunConfig parse_config(std::istream& in) {
    RunConfig config;
    bool saw_lambda = false, saw_degree = false;
    std::string section, raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::string s = trim(raw);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header");
            section = s.substr(1, s.size() - 2);
            if (section != "model" && section != "schedule" && section != "certify" && section != "oracle" &&
                section != "table" && section != "output")
                fail(line, "unknown section [" + section + "]");
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (value.empty()) fail(line, "missing value for '" + key + "'");

        if (section == "model") {
            if (key == "q")
                config.q = parse_uint(value, line);
            else if (key == "lambda")
                config.lambda = parse_rat(value, line), saw_lambda = true;
            else if (key == "degree")
                config.degree = parse_degree(value, line), saw_degree = true;
            else if (key == "symmetric")
                config.symmetric = parse_bool(value, line);
            else
                fail(line, "unknown key '" + key + "' in [model]");
        } else if (section == "schedule") {
            if (key == "iterations")
                config.iterations = static_cast<unsigned>(parse_uint(value, line));
            else if (key == "skeletons") {
                for (const auto& [from, spec] : parse_tuples(value, line))
                    config.plan.push_back({static_cast<unsigned>(parse_uint(from, line)), spec});
            } else if (key == "rounding_denominator")
                config.rounding_denominator = parse_uint(value, line);
            else if (key == "support_cap")
                config.support_cap = parse_uint(value, line);
            else
                fail(line, "unknown key '" + key + "' in [schedule]");
        } else if (section == "certify") {
            if (key == "subintervals")
                config.subintervals = static_cast<unsigned>(parse_uint(value, line));
            else if (key == "x_hat")
                config.x_hat = parse_rat(value, line);
            else
                fail(line, "unknown key '" + key + "' in [certify]");
        } else if (section == "oracle") {
            if (key == "depth")
                config.oracle_depth = static_cast<unsigned>(parse_uint(value, line));
            else
                fail(line, "unknown key '" + key + "' in [oracle]");
        } else if (section == "table") {
            if (key == "degree")
                config.table_rows.push_back(parse_degree(value, line));
            else
                fail(line, "unknown key '" + key + "' in [table]");
        } else if (section == "output") {
            if (key == "trace")
                config.trace_file = value;
            else if (key == "report")
                config.report_file = value;
            else if (key == "oracle")
                config.oracle_file = value;
            else if (key == "table")
                config.table_file = value;
            else
                fail(line, "unknown key '" + key + "' in [output]");
        } else {
            fail(line, "key outside any section");
        }
    }
    if (!saw_lambda) throw std::runtime_error("config: [model] lambda is required");
    if (!saw_degree) throw std::runtime_error("config: [model] degree is required");
    config.validate();
    return config;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    return parse_config(in);
}

std::string serialize_config(const RunConfig& config) {
    std::ostringstream out;
    out << "[model]\n";
    out << "q = " << config.q << "\n";
    out << "lambda = " << rat_str(config.lambda) << "\n";
    out << "degree = " << degree_str(config.degree) << "\n";
    out << "symmetric = " << (config.symmetric ? "true" : "false") << "\n";
    out << "\n[schedule]\n";
    out << "iterations = " << config.iterations << "\n";
    if (!config.plan.empty()) {
        out << "skeletons = [";
        for (std::size_t i = 0; i < config.plan.size(); ++i) {
            if (i) out << ", ";
            out << "(" << config.plan[i].from_iteration << ", " << config.plan[i].skeleton << ")";
        }
        out << "]\n";
    }
    out << "rounding_denominator = " << config.rounding_denominator << "\n";
    out << "support_cap = " << config.support_cap << "\n";
    out << "\n[certify]\n";
    out << "subintervals = " << config.subintervals << "\n";
    if (config.x_hat) out << "x_hat = " << rat_str(*config.x_hat) << "\n";
    out << "\n[oracle]\n";
    out << "depth = " << config.oracle_depth << "\n";
    if (!config.table_rows.empty()) {
        out << "\n[table]\n";
        for (const auto& row : config.table_rows) out << "degree = " << degree_str(row) << "\n";
    }
    out << "\n[output]\n";
    out << "trace = " << config.trace_file << "\n";
    out << "report = " << config.report_file << "\n";
    out << "oracle = " << config.oracle_file << "\n";
    out << "table = " << config.table_file << "\n";
    return out.str();
}

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : serialize_config(config)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

ModelSpec make_model(const RunConfig& config) {
    config.validate();
    Channel ch = potts_channel(config.q, config.lambda);
    SymmetryGroup sym = config.symmetric ? SymmetryGroup::symmetric(config.q) : SymmetryGroup::trivial(config.q);
    return ModelSpec{config.q, {LevelSpec{config.degree, {{ch.matrix, Rational(1)}}}}, std::move(sym)};
}

Schedule make_schedule(const RunConfig& config, const ModelSpec& model) {
    Schedule sched;
    sched.iterations = config.iterations;
    sched.rounding_denominator = config.rounding_denominator;
    sched.support_cap = config.support_cap;
    for (const auto& e : config.plan)
        sched.plan.push_back({e.from_iteration, resolve_skeleton(e.skeleton, config.q, model.symmetry)});
    sched.validate(config.q);
    return sched;
}

int cmd_run(const RunConfig& config, const std::string& out_dir, std::ostream& log) {
    ModelSpec model = make_model(config);
    Schedule sched = make_schedule(config, model);
    RunResult result = run(model, sched);
    std::ofstream out = open_out(out_dir, config.trace_file, config);
    result.trace.write_csv(out);
    const BoundRecord& last = result.trace.records.back();
    log << "run: " << last.iteration << " iterations, final x_bound = " << decimal_string(last.x_bound)
        << ", tv_bound = " << decimal_string(last.tv_bound) << "\n";
    for (const auto& w : result.trace.warnings) log << "warning: " << w << "\n";
    log << "trace written to " << out_dir << "/" << config.trace_file << "\n";
    return 0;
}

int cmd_certify(const RunConfig& config, const std::string& out_dir, std::ostream& log) {
    Certificate cert;
    ContractionProblem problem{config.q, config.lambda, config.degree, Rational(0)};
    if (config.x_hat) {
        problem.x_hat = *config.x_hat;
        cert = certify_contraction(problem, config.subintervals);
    } else {
        ModelSpec model = make_model(config);
        Schedule sched = make_schedule(config, model);
        CertifyOutcome outcome = end_to_end_certify(model, sched, config.subintervals);
        cert = outcome.certificate;
        problem = outcome.problem;
        std::ofstream trace_out = open_out(out_dir, config.trace_file, config);
        outcome.trace.write_csv(trace_out);
        log << "engine stopped after " << outcome.trace.records.back().iteration
            << " iterations, x_hat = " << decimal_string(problem.x_hat) << "\n";
    }
    std::ofstream out = open_out(out_dir, config.report_file, config);
    cert.write_report(out, problem);
    log << (cert.certified() ? "CERTIFIED" : "NOT CERTIFIED") << ", C = " << decimal_string(cert.contraction) << "\n";
    log << "report written to " << out_dir << "/" << config.report_file << "\n";
    return cert.certified() ? 0 : 1;
}

int cmd_oracle(const RunConfig& config, const std::string& out_dir, std::ostream& log) {
    if (config.degree.atoms.size() != 1 || config.degree.atoms.front().second != 1)
        throw std::invalid_argument("oracle: needs a point-mass degree distribution");
    const unsigned d = config.degree.atoms.front().first;
    Channel ch = potts_channel(config.q, config.lambda);

    ResidualDistribution recursed = ResidualDistribution::uniform_over_basis(config.q);
    std::vector<PotentialMatrix> pots(d, ch.matrix);
    for (unsigned level = 0; level < config.oracle_depth; ++level)
        recursed = residual_exact(std::vector<ResidualDistribution>(d, recursed), pots);
    ResidualDistribution brute =
        brute_force_residual(TreeInstance::complete(config.q, config.oracle_depth, d, ch.matrix));
    bool match = recursed == brute;

    std::ofstream out = open_out(out_dir, config.oracle_file, config);
    out << "q = " << config.q << ", lambda = " << rat_str(config.lambda) << ", d = " << d
        << ", depth = " << config.oracle_depth << "\n\nrecursion:\n";
    for (const auto& [eta, w] : recursed.support()) {
        for (std::size_t a = 0; a < eta.dim(); ++a) out << (a ? " " : "  ") << rat_str(eta[a]);
        out << "  weight " << rat_str(w) << "\n";
    }
    out << "\nbrute force:\n";
    for (const auto& [eta, w] : brute.support()) {
        for (std::size_t a = 0; a < eta.dim(); ++a) out << (a ? " " : "  ") << rat_str(eta[a]);
        out << "  weight " << rat_str(w) << "\n";
    }
    out << "\nverdict: " << (match ? "MATCH" : "MISMATCH") << "\n";
    log << "oracle cross-check: " << (match ? "MATCH" : "MISMATCH") << " (" << recursed.size()
        << " support points)\n";
    log << "details written to " << out_dir << "/" << config.oracle_file << "\n";
    return match ? 0 : 1;
}

int cmd_table(const RunConfig& config, const std::string& out_dir, std::ostream& log) {
    std::vector<DegreeDistribution> rows = config.table_rows;
    if (rows.empty()) rows.push_back(config.degree);
    std::ofstream out = open_out(out_dir, config.table_file, config);
    std::size_t width = 17;
    for (const auto& row : rows) width = std::max(width, degree_str(row).size());
    std::ostringstream table;
    table << "degree" << std::string(width - 5, ' ') << "KS        MP        this work\n";
    for (const auto& row : rows) {
        std::string name = degree_str(row);
        name.resize(width + 1, ' ');
        Enclosure ks = ks_bound(row);
        Enclosure mp = mp_bound(config.q, row);
        // A row earns a "this work" entry when the configured lambda and
        // x_hat certify contraction for that degree distribution.
        std::string ours = "-";
        if (config.x_hat) {
            ContractionProblem problem{config.q, config.lambda, row, *config.x_hat};
            if (certify_contraction(problem, config.subintervals).certified()) ours = rat_str(config.lambda);
        }
        table << name << " " << decimal_floor(ks.lo, 4) << (ks.exact() ? "  " : "..") << "  "
              << decimal_floor(mp.lo, 4) << (mp.exact() ? "  " : "..") << "  " << ours << "\n";
    }
    out << table.str();
    log << table.str();
    log << "table written to " << out_dir << "/" << config.table_file << "\n";
    return 0;
}

}  // namespace survey
