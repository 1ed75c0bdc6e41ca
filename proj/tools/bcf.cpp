// bcf: command-line interface to the finite-level Bost-Connes machinery.
//
// Subcommands: field, ideals, zeta, space, state, diagnostic, lattice, verify.
// Tabular output is CSV with a header row, single evaluations are JSON;
// floats print with 17 significant digits by default so output is lossless
// and diffable.  Exit codes: 0 success, 1 verification failure, 2 usage or
// validation error.  BC_FIELDS_THREADS caps the fan-out of grid loops; rows
// are always emitted in deterministic grid order.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "bcfields/bcfields.hpp"
#include "bcfields/verify.hpp"

using namespace bcf;
using nlohmann::json;

namespace {

int g_precision = 17;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", g_precision, x);
    return buf;
}

int thread_budget() {
    const char* env = std::getenv("BC_FIELDS_THREADS");
    if (!env) return 1;
    int n = std::atoi(env);
    return n < 1 ? 1 : n;
}

// deterministic fan-out: results land in input order regardless of threads
template <typename Fn>
std::vector<std::string> parallel_rows(size_t n, Fn&& fn) {
    std::vector<std::string> rows(n);
    int workers = std::min<int>(thread_budget(), int(n));
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) rows[i] = fn(i);
        return rows;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) rows[i] = fn(i);
        });
    for (auto& t : pool) t.join();
    return rows;
}

struct Output {
    std::string path; // empty = stdout
    void write(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot open output path " + path);
        f << text;
    }
};

// --- level / function / lattice descriptor parsing --------------------------

// "12" (plain modulus, factored) or a comma list of tokens "p^k" / "p" /
// "pr<root>^k"; over a quadratic field a bare rational p expands to every
// prime above it, a root suffix selects one split factor
std::vector<LevelPrime> parse_level(const FieldSpec& F, const std::string& s) {
    std::vector<LevelPrime> lps;
    auto add_prime_token = [&](const std::string& tok) {
        int depth = 1;
        std::string base = tok;
        auto caret = tok.find('^');
        if (caret != std::string::npos) {
            base = tok.substr(0, caret);
            depth = std::stoi(tok.substr(caret + 1));
        }
        i64 root = -1;
        auto rpos = base.find('r');
        i64 p = std::stoll(rpos == std::string::npos ? base : base.substr(0, rpos));
        if (rpos != std::string::npos) root = std::stoll(base.substr(rpos + 1));
        bool found = false;
        for (auto& P : split_prime(F, p))
            if (root < 0 || P.root == root) {
                lps.push_back({P, depth});
                found = true;
            }
        if (!found)
            throw std::invalid_argument("no prime with root " + std::to_string(root) + " over " +
                                        std::to_string(p));
    };
    if (s.find(',') == std::string::npos && s.find('^') == std::string::npos &&
        s.find('r') == std::string::npos) {
        i64 M = std::stoll(s);
        if (M < 2) throw std::invalid_argument("level modulus must be >= 2");
        for (auto& [p, e] : factorize(M)) add_prime_token(std::to_string(p) + "^" + std::to_string(e));
        return lps;
    }
    size_t pos = 0;
    while (pos < s.size()) {
        size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        add_prime_token(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return lps;
}

// "<a>", "<a>+<b>t", "<a>-<b>t", "<b>t"
OElement parse_element(const std::string& s) {
    auto tpos = s.find('t');
    if (tpos == std::string::npos) return OElement(std::stoll(s));
    std::string body = s.substr(0, tpos);
    size_t split = std::string::npos;
    for (size_t i = body.size(); i-- > 1;)
        if (body[i] == '+' || body[i] == '-') {
            split = i;
            break;
        }
    i64 a = 0;
    std::string bs = body;
    if (split != std::string::npos) {
        a = std::stoll(body.substr(0, split));
        bs = body.substr(split);
    }
    if (bs.empty() || bs == "+") bs = "1";
    if (bs == "-") bs = "-1";
    return OElement(a, std::stoll(bs));
}

// cylinder function selectors: one | unit_indicator[:p] | point:<elem> | zero_fiber:p[,k]
CylinderFunction parse_function(const Level& L, const std::string& s) {
    auto colon = s.find(':');
    std::string kind = s.substr(0, colon == std::string::npos ? s.size() : colon);
    std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (kind == "one") return CylinderFunction::constant(L, 1.0);
    if (kind == "unit_indicator") {
        if (arg.empty()) return CylinderFunction::unit_indicator(L);
        i64 p = std::stoll(arg);
        std::vector<cplx> v(size_t(L.point_count()), 1.0);
        bool any = false;
        for (size_t ci = 0; ci < L.component_count(); ++ci)
            if (L.shapes()[ci].prime.p == p) {
                any = true;
                for (int i = 0; i < L.point_count(); ++i)
                    if (L.valuation(i, ci) != 0) v[size_t(i)] = 0.0;
            }
        if (!any) throw std::invalid_argument("unit_indicator: no level prime over " + arg);
        return CylinderFunction(L, v);
    }
    if (kind == "point") return CylinderFunction::indicator(L, L.point_of_element(parse_element(arg)));
    if (kind == "zero_fiber") {
        auto comma = arg.find(',');
        i64 p = std::stoll(arg.substr(0, comma));
        int ci = -1;
        for (size_t i = 0; i < L.component_count(); ++i)
            if (L.shapes()[i].prime.p == p) ci = int(i);
        if (ci < 0) throw std::invalid_argument("zero_fiber: no level prime over " + arg);
        int k = comma == std::string::npos ? L.shapes()[size_t(ci)].depth : std::stoi(arg.substr(comma + 1));
        std::vector<cplx> v(size_t(L.point_count()), 0.0);
        for (int i = 0; i < L.point_count(); ++i)
            if (L.valuation(i, size_t(ci)) >= k) v[size_t(i)] = 1.0;
        return CylinderFunction(L, v);
    }
    throw std::invalid_argument("unknown function selector '" + s + "'");
}

// ideal grammar: "1", rational "n" or "n/d" (principal), or factor tokens
// "p<p>[r<root>]^<e>" joined by '*'
Ideal parse_ideal(const FieldSpec& F, const std::string& s) {
    if (s == "1") return unit_ideal();
    if (s.find('p') == std::string::npos) {
        auto slash = s.find('/');
        Ideal a = principal_ideal(F, std::stoll(s.substr(0, slash)));
        if (slash != std::string::npos) a = a * principal_ideal(F, std::stoll(s.substr(slash + 1))).inverse();
        return a;
    }
    std::vector<std::pair<PrimeIdeal, int>> fs;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t next = s.find('*', pos);
        if (next == std::string::npos) next = s.size();
        std::string tok = s.substr(pos, next - pos);
        if (tok.empty() || tok[0] != 'p') throw std::invalid_argument("bad ideal token '" + tok + "'");
        int e = 1;
        auto caret = tok.find('^');
        std::string base = tok.substr(1, (caret == std::string::npos ? tok.size() : caret) - 1);
        if (caret != std::string::npos) e = std::stoi(tok.substr(caret + 1));
        i64 root = -1;
        auto rpos = base.find('r');
        i64 p = std::stoll(rpos == std::string::npos ? base : base.substr(0, rpos));
        if (rpos != std::string::npos) root = std::stoll(base.substr(rpos + 1));
        auto above = split_prime(F, p);
        const PrimeIdeal* chosen = nullptr;
        for (auto& P : above)
            if (root >= 0 ? P.root == root : above.size() == 1) chosen = &P;
        if (!chosen)
            throw std::invalid_argument("ambiguous or unknown prime token '" + tok +
                                        "' (split primes need an explicit root: p5r2)");
        fs.emplace_back(*chosen, e);
        pos = next + 1;
    }
    return Ideal(fs);
}

// lattice descriptor "ideal=<ideal>;t=<elem>[;sign=+|-]"
KLattice1 parse_lattice(const FieldSpec& F, const Level& L, const std::string& s) {
    Ideal ideal = unit_ideal();
    OElement t(1);
    int sign = +1;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t next = s.find(';', pos);
        if (next == std::string::npos) next = s.size();
        std::string kv = s.substr(pos, next - pos);
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad lattice field '" + kv + "'");
        std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "ideal")
            ideal = parse_ideal(F, val);
        else if (key == "t")
            t = parse_element(val);
        else if (key == "sign")
            sign = (val == "-" || val == "-1") ? -1 : +1;
        else
            throw std::invalid_argument("unknown lattice field '" + key + "'");
        pos = next + 1;
    }
    return make_lattice(F, L, ideal, sign, t);
}

// --- config file ingestion ---------------------------------------------------

// Reads --config <file> (a JSON object mirroring long flag names) and splices
// the entries as flags in front of the explicit arguments, which therefore
// win.  Unknown keys are rejected against the subcommand's option list.
std::vector<std::string> splice_config(CLI::App* sub, std::vector<std::string> args) {
    std::string path;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a path");
            path = args[i + 1];
            args.erase(args.begin() + long(i), args.begin() + long(i) + 2);
            break;
        }
    }
    if (path.empty()) return args;
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot read config file " + path);
    json j = json::parse(f);
    if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
    std::vector<std::string> merged;
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string flag = "--" + it.key();
        if (!sub->get_option_no_throw(flag))
            throw std::invalid_argument("unknown config key '" + it.key() + "'");
        if (it.value().is_boolean()) {
            if (it.value().get<bool>()) merged.push_back(flag);
        } else {
            merged.push_back(flag);
            merged.push_back(it.value().is_string() ? it.value().get<std::string>() : it.value().dump());
        }
    }
    merged.insert(merged.end(), args.begin(), args.end());
    return merged;
}

void require_state_beta(double beta) {
    if (beta < 0) throw std::invalid_argument("no KMS states for beta < 0");
    if (beta == 0) throw std::invalid_argument("beta = 0 excluded");
}

std::vector<double> parse_beta_grid(const std::string& s) {
    auto c1 = s.find(':');
    auto c2 = c1 == std::string::npos ? std::string::npos : s.find(':', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument("beta grid must be start:stop:step");
    double a = std::stod(s.substr(0, c1));
    double b = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    double step = std::stod(s.substr(c2 + 1));
    if (step <= 0 || b < a) throw std::invalid_argument("beta grid must be increasing with positive step");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        double x = a + i * step;
        if (x > b + 1e-12) break;
        grid.push_back(x);
    }
    return grid;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-level Bost-Connes systems for Q and imaginary quadratic fields"};
    app.require_subcommand(1);

    struct CommonOpts {
        std::string field = "Q";
        std::string out;
        int precision = 17;
    };
    auto add_common = [](CLI::App* sub, CommonOpts& c, bool with_field = true) {
        if (with_field) sub->add_option("--field", c.field, "field descriptor: Q, Q(sqrt-1), Q(sqrt5)");
        sub->add_option("--out", c.out, "output path (default stdout)");
        sub->add_option("--precision", c.precision, "significant digits for floats")
            ->check(CLI::Range(1, 17));
    };

    auto* cmd_field = app.add_subcommand("field", "derived data of a field descriptor");
    CommonOpts field_opts;
    add_common(cmd_field, field_opts);

    auto* cmd_ideals = app.add_subcommand("ideals", "enumerate integral ideals by norm");
    CommonOpts ideals_opts;
    i64 ideals_bound = 100;
    add_common(cmd_ideals, ideals_opts);
    cmd_ideals->add_option("--bound", ideals_bound, "norm bound")->check(CLI::PositiveNumber);

    auto* cmd_zeta = app.add_subcommand("zeta", "truncated Dedekind zeta function");
    CommonOpts zeta_opts;
    double zeta_beta = 2.0;
    i64 zeta_bound = 100000;
    std::string zeta_method = "dirichlet";
    add_common(cmd_zeta, zeta_opts);
    cmd_zeta->add_option("--beta", zeta_beta, "inverse temperature");
    cmd_zeta->add_option("--bound", zeta_bound, "truncation norm")->check(CLI::PositiveNumber);
    cmd_zeta->add_option("--method", zeta_method, "dirichlet | euler")
        ->check(CLI::IsMember({"dirichlet", "euler"}));

    auto* cmd_space = app.add_subcommand("space", "finite-level Y with its mu_beta masses");
    CommonOpts space_opts;
    std::string space_level = "12";
    double space_beta = 1.0;
    bool space_table = false;
    add_common(cmd_space, space_opts);
    cmd_space->add_option("--level", space_level, "level: modulus or list like 2^2,3^1");
    cmd_space->add_option("--beta", space_beta, "inverse temperature");
    cmd_space->add_flag("--table", space_table, "emit the point,mass table");

    auto* cmd_state = app.add_subcommand("state", "evaluate a KMS state on a cylinder function");
    CommonOpts state_opts;
    std::string state_level = "12", state_w = "1", state_f = "one";
    double state_beta = 2.0;
    i64 state_bound = 100000;
    add_common(cmd_state, state_opts);
    cmd_state->add_option("--level", state_level, "level: modulus or list like 2^2,3^1");
    cmd_state->add_option("--beta", state_beta, "inverse temperature");
    cmd_state->add_option("--w", state_w, "extremal index in Y0-level (element, e.g. 7 or 1+1t)");
    cmd_state->add_option("--f", state_f, "one | unit_indicator[:p] | point:<elem> | zero_fiber:p[,k]");
    cmd_state->add_option("--bound", state_bound, "ideal-sum truncation")->check(CLI::PositiveNumber);

    auto* cmd_diag = app.add_subcommand("diagnostic", "uniqueness diagnostic N(a)^-beta R_B");
    CommonOpts diag_opts;
    std::string diag_chi = "3:1", diag_grid;
    double diag_beta = -1;
    i64 diag_bound = 1000000;
    add_common(cmd_diag, diag_opts);
    cmd_diag->add_option("--chi", diag_chi, "character selector m:e1,e2,...");
    cmd_diag->add_option("--beta", diag_beta, "single inverse temperature");
    cmd_diag->add_option("--beta-grid", diag_grid, "grid start:stop:step");
    cmd_diag->add_option("--bound", diag_bound, "Euler product truncation")->check(CLI::PositiveNumber);

    auto* cmd_lat = app.add_subcommand("lattice", "1-dimensional K-lattice operations");
    CommonOpts lat_opts;
    std::string lat_level = "12", lat_a, lat_b;
    add_common(cmd_lat, lat_opts);
    cmd_lat->add_option("--level", lat_level, "working level");
    cmd_lat->add_option("--a", lat_a, "lattice descriptor ideal=..;t=..[;sign=-]")->required();
    cmd_lat->add_option("--b", lat_b, "lattice descriptor")->required();
    auto* lat_comm = cmd_lat->add_subcommand("comm", "decide commensurability");
    auto* lat_grp = cmd_lat->add_subcommand("groupoid", "arrow coordinates of a commensurable pair");
    lat_comm->fallthrough();
    lat_grp->fallthrough();
    cmd_lat->require_subcommand(1);

    auto* cmd_verify = app.add_subcommand("verify", "run the bundled invariant suite");
    CommonOpts verify_opts;
    std::string verify_profile = "quick", verify_only;
    add_common(cmd_verify, verify_opts, false);
    cmd_verify->add_option("--profile", verify_profile, "quick | full")
        ->check(CLI::IsMember({"quick", "full"}));
    cmd_verify->add_option("--only", verify_only, "run a single named check");

    std::vector<std::string> raw(argv + 1, argv + argc);
    try {
        if (!raw.empty()) {
            CLI::App* sub = app.get_subcommand_no_throw(raw[0]);
            if (sub) {
                std::vector<std::string> rest(raw.begin() + 1, raw.end());
                rest = splice_config(sub, rest);
                raw.resize(1);
                raw.insert(raw.end(), rest.begin(), rest.end());
            }
        }
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (auto& s : raw) cargs.push_back(s.c_str());
        app.parse(int(cargs.size()), const_cast<char**>(cargs.data()));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*cmd_field) {
            g_precision = field_opts.precision;
            FieldSpec F = parse_field(field_opts.field);
            json j;
            j["field"] = F.name();
            j["kind"] = F.is_rational() ? "rational" : "quadratic";
            if (F.is_quadratic()) {
                j["d"] = F.d;
                j["integral_basis"] = pmod(F.d, 4) == 1 ? "theta = (1+sqrt(d))/2" : "theta = sqrt(d)";
            }
            j["discriminant"] = F.discriminant;
            j["is_imaginary"] = F.is_imaginary;
            j["w_K"] = F.w_K;
            j["cn1_imaginary"] = F.cn1_imaginary;
            Output{field_opts.out}.write(j.dump(2) + "\n");
            return 0;
        }
        if (*cmd_ideals) {
            FieldSpec F = parse_field(ideals_opts.field);
            std::string out = "norm,ideal\n";
            for (const Ideal& a : enumerate_ideals(F, ideals_bound))
                out += std::to_string(a.norm_integral()) + "," + a.str() + "\n";
            Output{ideals_opts.out}.write(out);
            return 0;
        }
        if (*cmd_zeta) {
            g_precision = zeta_opts.precision;
            FieldSpec F = parse_field(zeta_opts.field);
            double value = zeta_method == "euler" ? zeta_euler_smooth(F, zeta_beta, zeta_bound)
                                                  : zeta_partial(F, zeta_beta, zeta_bound);
            TailBound t = zeta_tail_bound(F, zeta_beta, zeta_bound);
            std::string out = "field,beta,bound,method,value,tail_bound,tail_rigorous\n";
            out += F.name() + "," + fmt(zeta_beta) + "," + std::to_string(zeta_bound) + "," + zeta_method +
                   "," + fmt(value) + "," + fmt(t.bound) + "," + (t.rigorous ? "true" : "false") + "\n";
            Output{zeta_opts.out}.write(out);
            return 0;
        }
        if (*cmd_space) {
            g_precision = space_opts.precision;
            FieldSpec F = parse_field(space_opts.field);
            require_state_beta(space_beta);
            Level L = Level::make(F, parse_level(F, space_level));
            if (space_table) {
                std::string out = "point,mass\n";
                for (int i = 0; i < L.point_count(); ++i)
                    out += L.point_str(i) + "," + fmt(L.point_mass(space_beta, i)) + "\n";
                Output{space_opts.out}.write(out);
            } else {
                KahanSum total;
                for (int i = 0; i < L.point_count(); ++i) total.add(L.point_mass(space_beta, i));
                json j;
                j["field"] = F.name();
                j["points"] = L.point_count();
                j["y0_points"] = L.y0_points().size();
                j["total_mass"] = total.value();
                Output{space_opts.out}.write(j.dump(2) + "\n");
            }
            return 0;
        }
        if (*cmd_state) {
            g_precision = state_opts.precision;
            FieldSpec F = parse_field(state_opts.field);
            require_state_beta(state_beta);
            Level L = Level::make(F, parse_level(F, state_level));
            CylinderFunction f = parse_function(L, state_f);
            EvalResult r;
            if (state_beta > 1.0)
                r = StateHandle::extremal(L, state_beta, L.point_of_element(parse_element(state_w)),
                                          state_bound)
                        .evaluate(f);
            else
                r = StateHandle::subcritical(L, state_beta).evaluate(f);
            json j;
            j["value"] = r.value.real();
            j["tail"] = r.tail;
            Output{state_opts.out}.write(j.dump(2) + "\n");
            return 0;
        }
        if (*cmd_diag) {
            g_precision = diag_opts.precision;
            FieldSpec F = parse_field(diag_opts.field);
            Character chi = parse_character(diag_chi);
            bool has_grid = !diag_grid.empty(), has_beta = diag_beta > 0;
            if (has_grid && has_beta)
                throw std::invalid_argument("conflicting options: give either beta or beta-grid");
            std::vector<double> grid =
                has_grid ? parse_beta_grid(diag_grid) : std::vector<double>{has_beta ? diag_beta : 1.0};
            auto rows = parallel_rows(grid.size(), [&](size_t i) {
                double ratio = uniqueness_diagnostic(F, chi, grid[i], diag_bound);
                return F.name() + "," + chi.str() + "," + fmt(grid[i]) + "," + std::to_string(diag_bound) +
                       "," + fmt(ratio) + "\n";
            });
            std::string out = "field,chi,beta,bound,ratio\n";
            for (auto& r : rows) out += r;
            Output{diag_opts.out}.write(out);
            return 0;
        }
        if (*cmd_lat) {
            FieldSpec F = parse_field(lat_opts.field);
            Level L = Level::make(F, parse_level(F, lat_level));
            KLattice1 a = parse_lattice(F, L, lat_a);
            KLattice1 b = parse_lattice(F, L, lat_b);
            if (*lat_comm) {
                Output{lat_opts.out}.write(commensurable(a, b) ? "true\n" : "false\n");
                return 0;
            }
            if (*lat_grp) {
                GroupoidArrow arrow = to_groupoid(a, b);
                json j;
                j["g"] = arrow.g.str();
                j["y"] = L.point_str(arrow.y);
                Output{lat_opts.out}.write(j.dump(2) + "\n");
            }
            return 0;
        }
        if (*cmd_verify) {
            g_precision = verify_opts.precision;
            verify::Profile profile =
                verify_profile == "full" ? verify::Profile::full : verify::Profile::quick;
            verify::Report rep = verify::run_verify(profile, verify_only);
            std::string out = "check,status,residual\n";
            for (auto& r : rep.rows)
                out += r.name + "," + (r.pass ? "pass" : "fail") + "," + fmt(r.residual) + "\n";
            Output{verify_opts.out}.write(out);
            return rep.all_pass() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
