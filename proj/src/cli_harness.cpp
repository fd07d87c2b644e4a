#include "homoperc/cli_harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace homoperc {

using nlohmann::json;

std::string to_string(Mode m) {
    switch (m) {
        case Mode::betti: return "betti";
        case Mode::trial: return "trial";
        case Mode::sweep: return "sweep";
        case Mode::threshold: return "threshold";
        case Mode::audit: return "audit";
    }
    return "threshold";
}

Mode mode_from_string(const std::string& s) {
    if (s == "betti") return Mode::betti;
    if (s == "trial") return Mode::trial;
    if (s == "sweep") return Mode::sweep;
    if (s == "threshold") return Mode::threshold;
    if (s == "audit") return Mode::audit;
    throw std::invalid_argument("unknown mode '" + s + "'");
}

namespace {

bool admissible(ModelKind model, int d, std::uint32_t q) {
    if (model == ModelKind::cubical) return q != 2;
    return (d + 1) % static_cast<int>(q) != 0;
}

int top_dimension(const ExperimentConfig& c) {
    if (c.mode == Mode::betti) return c.d;
    return std::max(c.i, c.d - c.i) + 1;
}

}  // namespace

std::uint32_t effective_field(const ExperimentConfig& c) {
    if (c.q != 0) return c.q;
    if (admissible(c.model, c.d, 3)) return 3;
    for (std::uint32_t q = 2;; ++q) {
        if (is_prime(q) && admissible(c.model, c.d, q)) return q;
    }
}

std::vector<std::string> validate(const ExperimentConfig& c) {
    std::vector<std::string> v;
    const bool cubical = c.model == ModelKind::cubical;
    const int d_max = cubical ? 12 : 8;
    const int n_min = cubical ? 3 : 4;
    bool shape_ok = true;
    if (c.d < 2 || c.d > d_max) {
        v.push_back("d must lie in [2, " + std::to_string(d_max) + "] for the " + to_string(c.model) +
                    " model, got " + std::to_string(c.d));
        shape_ok = false;
    }
    if (c.i < 1 || c.i > c.d - 1) {
        v.push_back("1 <= i <= d-1 required, got i=" + std::to_string(c.i) + " d=" + std::to_string(c.d));
        shape_ok = false;
    }
    if (c.N < n_min || c.N > 65536) {
        v.push_back("N must lie in [" + std::to_string(n_min) + ", 65536] for the " + to_string(c.model) +
                    " model, got " + std::to_string(c.N));
        shape_ok = false;
    }
    if (c.q != 0 && (c.q >= 65536 || !is_prime(c.q))) {
        v.push_back("q must be a prime below 65536, got " + std::to_string(c.q));
    } else if (c.q != 0 && shape_ok && !admissible(c.model, c.d, c.q)) {
        if (cubical) {
            v.push_back("char(F) ≠ 2 required for the cubical model, got q=2");
        } else {
            v.push_back("char(F) ∤ d+1 required for the permutohedral model, got q=" + std::to_string(c.q) +
                        " with d+1=" + std::to_string(c.d + 1));
        }
    }
    if (c.mode != Mode::betti && c.trials < 1) v.push_back("trials must be at least 1");
    if (c.mode == Mode::trial || c.mode == Mode::audit || c.mode == Mode::sweep) {
        if (c.p_grid.empty()) v.push_back("at least one probability p is required");
    }
    for (double p : c.p_grid) {
        if (!(p >= 0.0 && p <= 1.0)) v.push_back("probabilities must lie in [0, 1], got " + format_double(p));
    }
    if (c.format != "csv" && c.format != "json") v.push_back("format must be csv or json, got '" + c.format + "'");
    if (c.threads < 1) v.push_back("threads must be at least 1");
    if (c.method == CriticalMethod::winding && c.i != 1 && (c.mode == Mode::threshold || c.mode == Mode::sweep)) {
        v.push_back("the winding method needs i=1");
    }
    if (c.emit_svg) {
        if (c.mode != Mode::threshold && c.mode != Mode::sweep) {
            v.push_back("svg output needs threshold or sweep mode");
        } else if (c.svg_path.empty() && (c.output.empty() || c.output == "-")) {
            v.push_back("svg output needs an output path or an svg path");
        }
    }
    if (shape_ok) {
        const int top = top_dimension(c);
        const double sites = std::pow(static_cast<double>(c.N), c.d);
        if (sites > 4.0e9) {
            v.push_back("torus has " + format_double(sites) + " vertices, more than 32-bit site ids allow");
        } else {
            double cells = 0.0;
            try {
                cells = cubical ? static_cast<double>(binomial(c.d, top)) * sites
                                : static_cast<double>(simplex_count(c.d, c.N, top));
            } catch (const std::exception& e) {
                v.push_back(e.what());
            }
            if (cells > static_cast<double>(c.budget)) {
                v.push_back("complex has " + format_double(cells) + " cells in dimension " + std::to_string(top) +
                            ", above the budget of " + std::to_string(c.budget));
            }
        }
    }
    return v;
}

// ---------------------------------------------------------------------------

namespace {

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < n; k = next++) {
            try {
                fn(k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::vector<std::size_t> betti_numbers(const ExperimentConfig& c, const PrimeField& f) {
    std::vector<std::size_t> out;
    if (c.model == ModelKind::cubical) {
        const auto cx = cubical_chain_complex(TorusSpec{c.d, c.N, c.i}, c.d, f);
        for (int k = 0; k <= c.d; ++k) out.push_back(betti(cx, k));
        return out;
    }
    const auto clique = build_clique_complex(PermTorusSpec{c.d, c.N, c.i}, c.d, c.budget);
    const auto cx = clique_chain_complex(clique, c.d, f);
    for (int k = 0; k <= c.d; ++k) out.push_back(betti(cx, k));
    return out;
}

// Ranks on both sides of the duality; records a violation instead of throwing.
struct Audited {
    std::size_t phi = 0;
    std::size_t psi = 0;
    bool event_A = false;
    bool event_S = false;
    bool ok = true;
};

Audited audit_sample(const PercolationModel& m, const PercSample& s) {
    Audited a;
    const auto primal = m.evaluate(s);
    const auto dual = m.evaluate(dual_sample(m, s));
    a.phi = primal.rank_phi;
    a.psi = dual.rank_phi;
    a.event_A = primal.event_A;
    a.event_S = primal.event_S;
    a.ok = a.phi + a.psi == m.homology_rank();
    return a;
}

std::string violation_message(const ExperimentConfig& c, std::uint64_t trial, double p, const Audited& a,
                              std::size_t D) {
    return "duality audit failed at trial " + std::to_string(trial) + " p=" + format_double(p) +
           ": rank_phi=" + std::to_string(a.phi) + " rank_psi=" + std::to_string(a.psi) + " expected sum " +
           std::to_string(D) + " (" + to_string(c.model) + " d=" + std::to_string(c.d) + ")";
}

}  // namespace

RunResult execute(const ExperimentConfig& c) {
    RunResult r;
    const PrimeField f(effective_field(c));
    if (c.mode == Mode::betti) {
        r.betti = betti_numbers(c, f);
        return r;
    }
    const PercolationModel m(ModelSpec{c.model, c.d, c.N, c.i}, f, c.budget);
    const std::size_t D = m.homology_rank();
    const std::size_t per_trial = c.mode == Mode::threshold ? 1 : c.p_grid.size();
    r.rows.resize(c.trials * per_trial);
    std::vector<std::vector<std::string>> failures(c.trials);

    parallel_for(c.trials, c.threads, [&](std::size_t t) {
        const auto start = std::chrono::steady_clock::now();
        auto rng = trial_stream(c.seed, t);
        ResultRow* rows = &r.rows[t * per_trial];
        auto finish = [&] {
            if (!c.timing) return;
            const double ms = elapsed_ms(start);
            for (std::size_t k = 0; k < per_trial; ++k) rows[k].ms = ms;
        };
        if (c.mode == Mode::trial || c.mode == Mode::audit) {
            for (std::size_t k = 0; k < c.p_grid.size(); ++k) {
                const double p = c.p_grid[k];
                const PercSample s = sample_at(m, p, rng);
                ResultRow& row = rows[k];
                row.trial = t;
                row.p = p;
                if (c.mode == Mode::trial) {
                    const auto rep = m.evaluate(s);
                    row.rank_phi = rep.rank_phi;
                    row.event_A = rep.event_A;
                    row.event_S = rep.event_S;
                } else {
                    const Audited a = audit_sample(m, s);
                    row.rank_phi = a.phi;
                    row.rank_psi = a.psi;
                    row.event_A = a.event_A;
                    row.event_S = a.event_S;
                    if (!a.ok) failures[t].push_back(violation_message(c, t, p, a, D));
                }
            }
            finish();
            return;
        }
        const WeightAssignment w = draw_weights(m, rng);
        const CriticalPair pair = critical_pair(m, w, c.method);
        if (c.mode == Mode::sweep) {
            for (std::size_t k = 0; k < c.p_grid.size(); ++k) {
                const double p = c.p_grid[k];
                const Audited a = audit_sample(m, sublevel(m, w, p));
                ResultRow& row = rows[k];
                row.trial = t;
                row.p = p;
                row.rank_phi = a.phi;
                row.rank_psi = a.psi;
                row.event_A = a.event_A;
                row.event_S = a.event_S;
                row.p_star_A = pair.A.value;
                row.p_star_S = pair.S.value;
                if (!a.ok) failures[t].push_back(violation_message(c, t, p, a, D));
            }
            finish();
            return;
        }
        ResultRow& row = rows[0];
        row.trial = t;
        row.p_star_A = pair.A.value;
        row.p_star_S = pair.S.value;
        if (c.audit_probes) {
            for (double p : c.p_grid) {
                const Audited a = audit_sample(m, sublevel(m, w, p));
                if (!a.ok) failures[t].push_back(violation_message(c, t, p, a, D));
            }
        }
        finish();
    });

    for (auto& f_t : failures) {
        for (auto& msg : f_t) r.errors.push_back(std::move(msg));
    }
    if (!r.errors.empty()) r.exit_code = kExitAuditFailure;
    return r;
}

// ---------------------------------------------------------------------------

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

template <class T, class Fmt>
std::string opt(const std::optional<T>& v, Fmt fmt) {
    return v ? fmt(*v) : std::string();
}

std::string bit(bool b) { return b ? "1" : "0"; }
std::string count(std::size_t n) { return std::to_string(n); }

}  // namespace

std::string csv_header() {
    return "model,d,i,N,q,seed,trial,p,rank_phi,rank_psi,event_A,event_S,p_star_A,p_star_S,ms";
}

std::string to_csv(const ExperimentConfig& c, const RunResult& r) {
    std::ostringstream os;
    const std::string q = std::to_string(effective_field(c));
    if (c.mode == Mode::betti) {
        os << "model,d,N,q,k,betti\n";
        for (std::size_t k = 0; k < r.betti.size(); ++k) {
            os << csv_field(to_string(c.model)) << ',' << c.d << ',' << c.N << ',' << q << ',' << k << ','
               << r.betti[k] << '\n';
        }
        return os.str();
    }
    os << csv_header() << '\n';
    for (const auto& row : r.rows) {
        const std::vector<std::string> fields{
            to_string(c.model),
            std::to_string(c.d),
            std::to_string(c.i),
            std::to_string(c.N),
            q,
            std::to_string(c.seed),
            std::to_string(row.trial),
            opt(row.p, format_double),
            opt(row.rank_phi, count),
            opt(row.rank_psi, count),
            opt(row.event_A, bit),
            opt(row.event_S, bit),
            opt(row.p_star_A, format_double),
            opt(row.p_star_S, format_double),
            opt(row.ms, format_double),
        };
        for (std::size_t k = 0; k < fields.size(); ++k) {
            if (k) os << ',';
            os << csv_field(fields[k]);
        }
        os << '\n';
    }
    return os.str();
}

namespace {

json config_json(const ExperimentConfig& c) {
    return json{
        {"model", to_string(c.model)},
        {"d", c.d},
        {"i", c.i},
        {"N", c.N},
        {"q", c.q},
        {"mode", to_string(c.mode)},
        {"p_grid", c.p_grid},
        {"trials", c.trials},
        {"seed", c.seed},
        {"budget", c.budget},
        {"output", c.output},
        {"format", c.format},
        {"emit_svg", c.emit_svg},
        {"svg_path", c.svg_path},
        {"threads", c.threads},
        {"method", to_string(c.method)},
        {"timing", c.timing},
        {"audit_probes", c.audit_probes},
    };
}

template <class T>
json opt_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

std::vector<double> column(const RunResult& r, bool star_A) {
    std::vector<double> out;
    std::uint64_t last = static_cast<std::uint64_t>(-1);
    for (const auto& row : r.rows) {
        const auto& v = star_A ? row.p_star_A : row.p_star_S;
        // sweep rows repeat the trial's criticals once per p
        if (v && row.trial != last) out.push_back(*v);
        last = row.trial;
    }
    return out;
}

json summary(const ExperimentConfig& c, const RunResult& r) {
    json s = json::object();
    s["effective_q"] = effective_field(c);
    if (c.mode == Mode::betti) {
        s["betti"] = r.betti;
        return s;
    }
    s["rows"] = r.rows.size();
    s["duality_failures"] = r.errors.size();
    const auto a = column(r, true);
    const auto b = column(r, false);
    if (!a.empty()) {
        s["median_p_star_A"] = median(a);
        s["median_p_star_S"] = median(b);
        json qa = json::object();
        json qs = json::object();
        for (double q : {0.05, 0.25, 0.5, 0.75, 0.95}) {
            qa[format_double(q)] = quantile(a, q);
            qs[format_double(q)] = quantile(b, q);
        }
        s["quantiles"] = {{"p_star_A", qa}, {"p_star_S", qs}};
    }
    json freq = json::array();
    for (double p : c.p_grid) {
        std::size_t n = 0;
        std::size_t hits_A = 0;
        std::size_t hits_S = 0;
        if (c.mode == Mode::threshold) {
            for (std::size_t k = 0; k < a.size(); ++k) {
                ++n;
                hits_A += a[k] <= p;
                hits_S += b[k] <= p;
            }
        } else {
            for (const auto& row : r.rows) {
                if (!row.p || *row.p != p || !row.event_A) continue;
                ++n;
                hits_A += *row.event_A;
                hits_S += *row.event_S;
            }
        }
        if (n == 0) continue;
        freq.push_back({{"p", p},
                        {"A", static_cast<double>(hits_A) / static_cast<double>(n)},
                        {"S", static_cast<double>(hits_S) / static_cast<double>(n)},
                        {"n", n}});
    }
    s["event_frequencies"] = freq;
    return s;
}

}  // namespace

std::string summary_json(const ExperimentConfig& c, const RunResult& r) { return summary(c, r).dump(2); }

std::string to_json(const ExperimentConfig& c, const RunResult& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({
            {"trial", row.trial},
            {"p", opt_json(row.p)},
            {"rank_phi", opt_json(row.rank_phi)},
            {"rank_psi", opt_json(row.rank_psi)},
            {"event_A", opt_json(row.event_A)},
            {"event_S", opt_json(row.event_S)},
            {"p_star_A", opt_json(row.p_star_A)},
            {"p_star_S", opt_json(row.p_star_S)},
            {"ms", opt_json(row.ms)},
        });
    }
    json doc{
        {"schema_version", kSchemaVersion},
        {"config", config_json(c)},
        {"rows", rows},
        {"summary", summary(c, r)},
        {"errors", r.errors},
    };
    return doc.dump(2) + "\n";
}

std::string config_to_json(const ExperimentConfig& c) { return config_json(c).dump(2); }

ExperimentConfig config_from_json(const std::string& text) {
    json doc = json::parse(text);
    if (doc.contains("config")) doc = doc.at("config");
    ExperimentConfig c;
    c.model = model_from_string(doc.at("model").get<std::string>());
    c.d = doc.at("d").get<int>();
    c.i = doc.at("i").get<int>();
    c.N = doc.at("N").get<int>();
    c.q = doc.at("q").get<std::uint32_t>();
    c.mode = mode_from_string(doc.at("mode").get<std::string>());
    c.p_grid = doc.at("p_grid").get<std::vector<double>>();
    c.trials = doc.at("trials").get<std::size_t>();
    c.seed = doc.at("seed").get<std::uint64_t>();
    c.budget = doc.at("budget").get<std::size_t>();
    c.output = doc.at("output").get<std::string>();
    c.format = doc.at("format").get<std::string>();
    c.emit_svg = doc.at("emit_svg").get<bool>();
    c.svg_path = doc.at("svg_path").get<std::string>();
    c.threads = doc.at("threads").get<unsigned>();
    c.method = method_from_string(doc.at("method").get<std::string>());
    c.timing = doc.at("timing").get<bool>();
    c.audit_probes = doc.at("audit_probes").get<bool>();
    return c;
}

// ---------------------------------------------------------------------------

namespace {

std::string fixed(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace

std::string render_cdf_svg(std::vector<double> values, const std::string& title) {
    std::sort(values.begin(), values.end());
    const double W = 480, H = 360, L = 50, R = 20, T = 30, B = 40;
    const double pw = W - L - R;
    const double ph = H - T - B;
    auto X = [&](double x) { return L + std::clamp(x, 0.0, 1.0) * pw; };
    auto Y = [&](double y) { return T + (1.0 - y) * ph; };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
       << W << ' ' << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
       << xml_escape(title) << "</text>\n";
    os << "<g stroke=\"black\" stroke-width=\"1\">\n";
    os << "<line x1=\"" << L << "\" y1=\"" << Y(0) << "\" x2=\"" << L + pw << "\" y2=\"" << Y(0) << "\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << Y(0) << "\" x2=\"" << L << "\" y2=\"" << Y(1) << "\"/>\n";
    os << "</g>\n<g font-family=\"sans-serif\" font-size=\"10\">\n";
    for (int k = 0; k <= 4; ++k) {
        const double t = k / 4.0;
        os << "<text x=\"" << fixed(X(t)) << "\" y=\"" << fixed(Y(0) + 14)
           << "\" text-anchor=\"middle\">" << fixed(t) << "</text>\n";
        os << "<text x=\"" << L - 6 << "\" y=\"" << fixed(Y(t) + 3) << "\" text-anchor=\"end\">" << fixed(t)
           << "</text>\n";
    }
    os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 6 << "\" text-anchor=\"middle\">p</text>\n";
    os << "</g>\n";
    os << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"" << fixed(X(0)) << ','
       << fixed(Y(0));
    const double n = static_cast<double>(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double x = X(values[k]);
        os << ' ' << fixed(x) << ',' << fixed(Y(k / n)) << ' ' << fixed(x) << ',' << fixed(Y((k + 1) / n));
    }
    os << ' ' << fixed(X(1)) << ',' << fixed(Y(values.empty() ? 0.0 : 1.0)) << "\"/>\n";
    os << "</svg>\n";
    return os.str();
}

// ---------------------------------------------------------------------------

namespace {

bool write_file(const std::string& path, const std::string& text, std::ostream& err) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) {
        err << "error: cannot write " << path << '\n';
        return false;
    }
    return true;
}

std::string svg_target(const ExperimentConfig& c) {
    if (!c.svg_path.empty()) return c.svg_path;
    const auto dot = c.output.find_last_of('.');
    const auto slash = c.output.find_last_of('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
        return c.output.substr(0, dot) + ".svg";
    }
    return c.output + ".svg";
}

}  // namespace

int run(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
    const auto violations = validate(c);
    if (!violations.empty()) {
        for (const auto& v : violations) err << "invalid config: " << v << '\n';
        return kExitInvalidConfig;
    }
    RunResult r;
    try {
        r = execute(c);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    const std::string text = c.format == "json" ? to_json(c, r) : to_csv(c, r);
    if (c.output.empty() || c.output == "-") {
        out << text;
    } else if (!write_file(c.output, text, err)) {
        return 1;
    }
    if (c.emit_svg) {
        const std::string title = "empirical CDF of p*_A, " + to_string(c.model) + " d=" + std::to_string(c.d) +
                                  " i=" + std::to_string(c.i) + " N=" + std::to_string(c.N);
        if (!write_file(svg_target(c), render_cdf_svg(column(r, true), title), err)) return 1;
    }
    for (const auto& e : r.errors) err << e << '\n';
    return r.exit_code;
}

}  // namespace homoperc
