// Command-line interface: every library capability behind one binary
// with reproducible seeds, JSON/CSV/text output, and stable exit codes
// (0 success, 1 not found within budget, 2 usage error).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "grr/charclass.hpp"
#include "grr/cubature.hpp"
#include "grr/invariant_quadratic.hpp"
#include "grr/plot_data.hpp"
#include "grr/poly_io.hpp"
#include "grr/presented_ring.hpp"
#include "grr/roundsearch.hpp"
#include "grr/sections.hpp"
#include "grr/sylow.hpp"
#include "grr/weights.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotFound = 1;
constexpr int kExitUsage = 2;

int env_threads() {
    const char* v = std::getenv("GRR_THREADS");
    if (!v) return 0;
    int t = std::atoi(v);
    return t > 0 ? t : 0;
}

struct OutputSink {
    std::string path;  // empty -> stdout

    void write(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + path);
        f << text;
    }
    void write_json(const json& j) const { write(j.dump(2) + "\n"); }
};

std::vector<std::string> nonempty_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        std::size_t b = line.find_last_not_of(" \t\r");
        std::string t = line.substr(a, b - a + 1);
        if (t.empty() || t[0] == '#') continue;
        out.push_back(t);
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot read file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/// Polynomial inputs: inline --poly strings plus lines of --poly-file.
std::vector<std::string> gather_poly_texts(const std::vector<std::string>& inline_polys,
                                           const std::string& poly_file) {
    std::vector<std::string> texts = inline_polys;
    if (!poly_file.empty())
        for (auto& l : nonempty_lines(read_file(poly_file))) texts.push_back(l);
    return texts;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json cmatrix_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json doubles_json(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(x);
    return out;
}

template <class C>
json schur_json(const grr::SchurExpansion<C>& e) {
    json terms = json::array();
    for (const auto& [lam, c] : e.coeffs) {
        json t;
        t["partition"] = lam.parts;
        if constexpr (std::is_same_v<C, grr::GF2>) {
            t["coeff"] = "1";
        } else {
            t["coeff"] = grr::detail::CoeffFormat<C>::str(c);
        }
        terms.push_back(std::move(t));
    }
    json out;
    out["zero"] = e.is_zero();
    out["terms"] = std::move(terms);
    return out;
}

json ellipsoid_json(const grr::Ellipsoid& e) {
    json out;
    out["center"] = vector_json(e.center);
    json shape = json::array();  // row-major
    for (Eigen::Index i = 0; i < e.shape.rows(); ++i)
        for (Eigen::Index j = 0; j < e.shape.cols(); ++j) shape.push_back(e.shape(i, j));
    out["shape"] = std::move(shape);
    out["ball_residual"] = grr::ball_residual(e);
    return out;
}

grr::Polytope polytope_from_json(const json& j) {
    grr::Polytope p;
    if (j.contains("vertices"))
        for (const auto& v : j.at("vertices")) {
            Eigen::VectorXd x(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<Eigen::Index>(i)) = v.at(i).get<double>();
            p.vertices.push_back(std::move(x));
        }
    if (j.contains("facets"))
        for (const auto& f : j.at("facets")) {
            grr::Facet fac;
            const auto& nrm = f.at("normal");
            fac.normal.resize(static_cast<Eigen::Index>(nrm.size()));
            for (std::size_t i = 0; i < nrm.size(); ++i)
                fac.normal(static_cast<Eigen::Index>(i)) = nrm.at(i).get<double>();
            fac.offset = f.at("offset").get<double>();
            p.facets.push_back(std::move(fac));
        }
    return p;
}

// ---------------------------------------------------------------------------
// Subcommand runners
// ---------------------------------------------------------------------------

struct CommonOpts {
    std::uint64_t seed = 0;
    double tol = 1e-8;
    bool tol_given = false;
    int restarts = 100;
    std::string output;
    std::string format = "json";
};

int run_obstruction(int d, int k, const std::string& field, int n, const CommonOpts& c) {
    if (c.format == "csv") throw std::invalid_argument("no plot series for this subcommand");
    grr::WeightSystem ws = grr::symmetric_power_weights(d, k);
    json out;
    out["d"] = d;
    out["k"] = k;
    out["field"] = field;
    std::optional<int> mn;
    bool zero;
    if (field == "real") {
        auto cls = grr::top_sw_class(ws);
        out["top_class"] = schur_json(cls);
        mn = grr::minimal_survival_n(cls);
        zero = cls.is_zero();
        out["bound"] = d % 2 == 1 ? json(grr::bound_thm4(d, k)) : json(nullptr);
        if (n > 0) out["survives_at_n"] = grr::survives_in(cls, n);
    } else if (field == "complex") {
        auto cls = grr::top_chern_class(ws);
        out["top_class"] = schur_json(cls);
        mn = grr::minimal_survival_n(cls);
        zero = cls.is_zero();
        out["bound"] = grr::bound_thm6(d, k);
        if (n > 0) out["survives_at_n"] = grr::survives_in(cls, n);
    } else {
        throw std::invalid_argument("--field must be real or complex");
    }
    out["minimal_n"] = mn ? json(*mn) : json(nullptr);
    OutputSink sink{c.output};
    if (c.format == "text") {
        std::ostringstream ss;
        ss << "top class over " << field << " for d=" << d << " k=" << k << ": "
           << (zero ? "zero" : "nonzero");
        if (mn) ss << ", minimal n = " << *mn;
        ss << "\n";
        sink.write(ss.str());
    } else {
        sink.write_json(out);
    }
    return kExitOk;
}

int run_bounds(int d, int k, int m, const CommonOpts& c) {
    if (c.format == "csv") throw std::invalid_argument("no plot series for this subcommand");
    json out;
    out["d"] = d;
    out["k"] = k;
    out["m"] = m;
    out["thm4"] = d % 2 == 1 ? json(grr::bound_thm4(d, k)) : json(nullptr);
    out["thm5"] = d % 2 == 1 ? json(grr::bound_thm5(d, k, m)) : json(nullptr);
    out["thm6"] = grr::bound_thm6(d, k);
    out["thm7"] = grr::bound_thm7(d, k, m);
    out["lower"] = grr::bound_lower(d, k);
    if (d == 2) out["remark_quadratic"] = grr::bound_remark_quadratic(k);
    OutputSink sink{c.output};
    if (c.format == "text") {
        std::ostringstream ss;
        ss << "bounds for d=" << d << " k=" << k << " m=" << m << ":";
        for (auto& [key, val] : out.items())
            if (key != "d" && key != "k" && key != "m" && !val.is_null())
                ss << " " << key << "=" << val.dump();
        ss << "\n";
        sink.write(ss.str());
    } else {
        sink.write_json(out);
    }
    return kExitOk;
}

int run_orbits(int delta, int h, const CommonOpts& c) {
    OutputSink sink{c.output};
    if (c.format == "csv") {
        grr::Series hs{"h", {}};
        grr::Series counts{"orbits", {}};
        for (int t = 1; t <= h; ++t) {
            hs.values.push_back(t);
            counts.values.push_back(
                static_cast<double>(grr::enumerate_orbits(delta, t).keys.size()));
        }
        sink.write(grr::emit_plot_data({hs, counts}));
        return kExitOk;
    }
    auto orbits = grr::enumerate_orbits(delta, h);
    if (c.format == "text") {
        std::ostringstream ss;
        ss << orbits.keys.size() << " orbits of " << delta << " unit vectors at height " << h
           << " (group order " << grr::group_order(h).str() << ")\n";
        for (const auto& key : orbits.keys) ss << "  " << key.str() << "\n";
        sink.write(ss.str());
        return kExitOk;
    }
    json out;
    out["delta"] = delta;
    out["h"] = h;
    out["group_order"] = grr::group_order(h).str();
    out["count"] = orbits.keys.size();
    json keys = json::array();
    for (const auto& key : orbits.keys) keys.push_back(key.str());
    out["orbits"] = std::move(keys);
    sink.write_json(out);
    return kExitOk;
}

int run_cubature(int k, int d, const std::vector<std::string>& poly_texts, const CommonOpts& c) {
    grr::Lemma2Cubature cub;
    std::vector<std::string> input_strs;
    if (poly_texts.empty()) {
        cub = grr::universal_cubature(k, d, c.seed);
    } else {
        std::vector<grr::SparsePoly<double>> polys;
        for (const auto& t : poly_texts) polys.push_back(grr::parse_poly<double>(t, k));
        cub = grr::build_lemma2_cubature(polys, k, c.seed);
    }
    for (const auto& g : cub.rounded_inputs) input_strs.push_back(grr::format_poly(g));
    double max_res = 0.0;
    for (double r : cub.residuals) max_res = std::max(max_res, r);

    OutputSink sink{c.output};
    if (c.format == "csv") {
        grr::Series idx{"input", {}};
        grr::Series res{"residual", {}};
        for (std::size_t i = 0; i < cub.residuals.size(); ++i) {
            idx.values.push_back(static_cast<double>(i));
            res.values.push_back(cub.residuals[i]);
        }
        sink.write(grr::emit_plot_data({idx, res}));
        return kExitOk;
    }
    if (c.format == "text") {
        std::ostringstream ss;
        ss << cub.transforms.size() << " transforms of degree " << cub.degree
           << ", max residual " << grr::detail::double_repr(max_res) << ", " << cub.samples_used
           << " rotation samples\n";
        sink.write(ss.str());
        return kExitOk;
    }
    json out;
    out["k"] = k;
    out["d"] = d;
    out["degree"] = cub.degree;
    out["seed"] = c.seed;
    out["support"] = cub.transforms.size();
    out["samples_used"] = cub.samples_used;
    out["inputs"] = input_strs;
    json ts = json::array();
    for (const auto& t : cub.transforms) {
        json tj;
        tj["scale"] = t.scale;
        tj["rotation"] = matrix_json(t.rotation);
        ts.push_back(std::move(tj));
    }
    out["transforms"] = std::move(ts);
    out["residuals"] = doubles_json(cub.residuals);
    out["max_residual"] = max_res;
    sink.write_json(out);
    return kExitOk;
}

int run_forms(int k, int d, const std::string& schedule, const CommonOpts& c) {
    grr::ConstructionSchedule sched = grr::ConstructionSchedule::parse(k, d, schedule);
    double stage_tol = c.tol_given ? c.tol : 1e-7;
    grr::RecursiveFormsResult r = grr::build_recursive_forms(sched, c.seed, stage_tol);

    OutputSink sink{c.output};
    if (c.format == "csv") {
        grr::Series stage{"stage", {}};
        grr::Series count{"transforms", {}};
        for (std::size_t i = 0; i < r.stage_counts.size(); ++i) {
            stage.values.push_back(static_cast<double>(i + 1));
            count.values.push_back(static_cast<double>(r.stage_counts[i]));
        }
        sink.write(grr::emit_plot_data({stage, count}));
        return kExitOk;
    }
    if (c.format == "text") {
        std::ostringstream ss;
        ss << r.forms.forms.size() << " linear forms on " << k
           << " variables, max stage residual " << grr::detail::double_repr(r.max_residual) << "\n";
        sink.write(ss.str());
        return kExitOk;
    }
    json out;
    out["k"] = k;
    out["d"] = d;
    out["blocks"] = sched.blocks;
    out["seed"] = c.seed;
    out["stage_tol"] = stage_tol;
    out["stage_counts"] = r.stage_counts;
    json forms = json::array();
    for (const auto& f : r.forms.forms) {
        json coeffs = json::array();
        for (int j = 0; j < k; ++j) {
            grr::Monomial m(static_cast<std::size_t>(k));
            m.e[static_cast<std::size_t>(j)] = 1;
            m.deg = 1;
            coeffs.push_back(f.coeff(m));
        }
        forms.push_back(std::move(coeffs));
    }
    out["forms"] = std::move(forms);
    out["max_residual"] = r.max_residual;
    sink.write_json(out);
    return kExitOk;
}

int search_output(const OutputSink& sink, const std::string& format, json& out,
                  const std::vector<double>& per_restart, bool found, double residual) {
    if (format == "csv") {
        grr::Series idx{"restart", {}};
        grr::Series res{"residual", per_restart};
        for (std::size_t i = 0; i < per_restart.size(); ++i)
            idx.values.push_back(static_cast<double>(i));
        grr::Series best{"running_min", grr::running_min(per_restart)};
        sink.write(grr::emit_plot_data({idx, res, best}));
    } else if (format == "text") {
        std::ostringstream ss;
        ss << (found ? "found" : "not found") << ", best residual "
           << grr::detail::double_repr(residual) << " after " << per_restart.size() << " restarts\n";
        sink.write(ss.str());
    } else {
        sink.write_json(out);
    }
    return found ? kExitOk : kExitNotFound;
}

int run_search(const std::string& mode_str, const std::string& field, int k, int n,
               const std::vector<std::string>& poly_texts, const CommonOpts& c) {
    if (poly_texts.empty()) throw std::invalid_argument("search needs --poly or --poly-file");
    grr::SearchMode mode;
    if (mode_str == "odd-zero")
        mode = grr::SearchMode::OddZero;
    else if (mode_str == "even-round")
        mode = grr::SearchMode::EvenRound;
    else
        throw std::invalid_argument("--mode must be odd-zero or even-round");

    OutputSink sink{c.output};
    json out;
    out["mode"] = mode_str;
    out["field"] = field;
    out["k"] = k;
    out["restarts_requested"] = c.restarts;
    out["seed"] = c.seed;
    out["tol"] = c.tol;

    if (field == "complex") {
        if (mode != grr::SearchMode::OddZero)
            throw std::invalid_argument("complex search supports only --mode odd-zero");
        std::vector<grr::SparsePoly<grr::Complex>> fs;
        for (const auto& t : poly_texts) fs.push_back(grr::parse_poly<grr::Complex>(t, n));
        auto rep = grr::complex_search(fs, k, c.restarts, c.seed, c.tol, env_threads());
        out["n"] = fs[0].nvars();
        out["restarts_used"] = rep.restarts_used;
        out["found"] = rep.found;
        out["residual"] = rep.residual;
        out["frame"] = cmatrix_json(rep.frame.rows);
        out["per_restart"] = doubles_json(rep.per_restart);
        return search_output(sink, c.format, out, rep.per_restart, rep.found, rep.residual);
    }
    if (field != "real") throw std::invalid_argument("--field must be real or complex");
    std::vector<grr::SparsePoly<double>> fs;
    for (const auto& t : poly_texts) fs.push_back(grr::parse_poly<double>(t, n));
    auto rep = grr::search(fs, k, mode, c.restarts, c.seed, c.tol, env_threads());
    out["n"] = fs[0].nvars();
    out["restarts_used"] = rep.restarts_used;
    out["found"] = rep.found;
    out["residual"] = rep.residual;
    out["frame"] = matrix_json(rep.frame.rows);
    out["per_restart"] = doubles_json(rep.per_restart);
    return search_output(sink, c.format, out, rep.per_restart, rep.found, rep.residual);
}

int run_quadratic(int k, int n, const std::vector<std::string>& poly_texts,
                  const CommonOpts& c) {
    if (c.format == "csv") throw std::invalid_argument("no plot series for this subcommand");
    if (poly_texts.size() > 1)
        throw std::invalid_argument("quadratic mode takes a single form");
    Eigen::MatrixXd a;
    if (!poly_texts.empty()) {
        grr::SparsePoly<double> f = grr::parse_poly<double>(poly_texts[0], n);
        if (f.is_zero() || f.degree() != 2 || !f.is_homogeneous())
            throw std::invalid_argument("quadratic mode needs a homogeneous degree-2 form");
        const int nv = f.nvars();
        a = Eigen::MatrixXd::Zero(nv, nv);
        for (const auto& [m, coef] : f.terms()) {
            int i = -1, j = -1;
            for (int v = 0; v < nv; ++v) {
                for (unsigned e = 0; e < m.e[static_cast<std::size_t>(v)]; ++e) {
                    if (i < 0)
                        i = v;
                    else
                        j = v;
                }
            }
            if (i == j || j < 0) {
                a(i, i) += coef;
            } else {
                a(i, j) += coef / 2.0;
                a(j, i) += coef / 2.0;
            }
        }
    } else {
        if (n <= 0) n = 2 * k - 1;
        grr::Rng rng(c.seed);
        Eigen::MatrixXd m = rng.normal_matrix(n, n);
        a = 0.5 * (m + m.transpose());
    }
    auto qr = grr::exact_round_quadratic(a, k);
    OutputSink sink{c.output};
    if (c.format == "text") {
        std::ostringstream ss;
        ss << "lambda " << grr::detail::double_repr(qr.lambda) << ", residual "
           << grr::detail::double_repr(qr.residual) << "\n";
        sink.write(ss.str());
        return kExitOk;
    }
    json out;
    out["k"] = k;
    out["n"] = a.rows();
    out["matrix"] = matrix_json(a);
    out["lambda"] = qr.lambda;
    out["residual"] = qr.residual;
    out["frame"] = matrix_json(qr.frame.rows);
    sink.write_json(out);
    return kExitOk;
}

int run_sections(const std::string& bodies_path, int k, const std::string& mode_str,
                 const CommonOpts& c) {
    if (bodies_path.empty()) throw std::invalid_argument("sections needs --bodies");
    json doc = json::parse(read_file(bodies_path));
    std::vector<grr::Polytope> bodies;
    for (const auto& b : doc.at("bodies")) bodies.push_back(polytope_from_json(b));
    std::optional<Eigen::VectorXd> x;
    if (doc.contains("x")) {
        const auto& xv = doc.at("x");
        Eigen::VectorXd v(xv.size());
        for (std::size_t i = 0; i < xv.size(); ++i) v(static_cast<Eigen::Index>(i)) = xv.at(i).get<double>();
        x = v;
    }

    grr::BodyMode mode;
    grr::EllipsoidKind kind;
    if (mode_str == "projection") {
        mode = grr::BodyMode::Projection;
        kind = grr::EllipsoidKind::Lowner;
    } else if (mode_str == "section") {
        mode = grr::BodyMode::Section;
        kind = grr::EllipsoidKind::Lowner;
    } else if (mode_str == "projection-john") {
        mode = grr::BodyMode::Projection;
        kind = grr::EllipsoidKind::John;
    } else if (mode_str == "section-john") {
        mode = grr::BodyMode::Section;
        kind = grr::EllipsoidKind::John;
    } else {
        throw std::invalid_argument(
            "--mode must be projection, section, projection-john, or section-john");
    }

    auto rep = grr::search_section_subspace(bodies, k, mode, x, kind, c.restarts, c.seed, c.tol,
                                            env_threads());
    OutputSink sink{c.output};
    json out;
    out["mode"] = grr::to_string(rep.body_mode);
    out["ellipsoid"] = grr::to_string(rep.kind);
    out["k"] = k;
    out["n"] = bodies[0].dim();
    out["bodies"] = bodies.size();
    out["restarts_requested"] = c.restarts;
    out["restarts_used"] = rep.restarts_used;
    out["seed"] = c.seed;
    out["tol"] = c.tol;
    out["found"] = rep.found;
    out["residual"] = rep.residual;
    out["frame"] = rep.found || rep.frame.rows.size() > 0 ? matrix_json(rep.frame.rows)
                                                          : json(nullptr);
    if (rep.frame.rows.size() > 0) {
        json es = json::array();
        for (const auto& body : bodies)
            es.push_back(ellipsoid_json(grr::detail::view_ellipsoid(body, rep.frame, mode, x, kind)));
        out["ellipsoids"] = std::move(es);
    }
    out["per_restart"] = doubles_json(rep.per_restart);
    return search_output(sink, c.format, out, rep.per_restart, rep.found, rep.residual);
}

int run_verify(int k, int d, const std::string& schedule, int sets, const CommonOpts& c) {
    if (c.format == "csv") throw std::invalid_argument("no plot series for this subcommand");
    grr::ConstructionSchedule sched = grr::ConstructionSchedule::parse(k, d, schedule);
    grr::RecursiveFormsResult forms = grr::build_recursive_forms(sched, c.seed);
    const int delta = sched.delta();
    const int h = grr::ConstructionSchedule::height_of(static_cast<int>(forms.forms.forms.size()));
    auto orbits = grr::enumerate_orbits(delta, h);

    double tol = c.tol_given ? c.tol : 1e-7;
    json results = json::array();
    double max_res = 0.0;
    for (int s = 0; s < sets; ++s) {
        grr::Rng rng = grr::Rng::substream(c.seed, 1000 + static_cast<std::uint64_t>(s));
        grr::InvariantCoefficients a;
        a.h = h;
        a.delta = delta;
        for (const auto& key : orbits.keys) a.values[key] = rng.uniform(-1.0, 1.0);
        auto rr = grr::verify_round_restriction(a, forms.forms);
        max_res = std::max(max_res, rr.residual);
        json jr;
        jr["scalar"] = rr.scalar;
        jr["residual"] = rr.residual;
        results.push_back(std::move(jr));
    }
    bool ok = max_res <= tol;

    OutputSink sink{c.output};
    if (c.format == "text") {
        std::ostringstream ss;
        ss << (ok ? "round" : "NOT round within tolerance") << ": max residual "
           << grr::detail::double_repr(max_res) << " over " << sets << " coefficient sets\n";
        sink.write(ss.str());
        return ok ? kExitOk : kExitNotFound;
    }
    json out;
    out["k"] = k;
    out["d"] = d;
    out["blocks"] = sched.blocks;
    out["sets"] = sets;
    out["seed"] = c.seed;
    out["tol"] = tol;
    out["construction_residual"] = forms.max_residual;
    out["results"] = std::move(results);
    out["max_residual"] = max_res;
    out["ok"] = ok;
    sink.write_json(out);
    return ok ? kExitOk : kExitNotFound;
}

int run_identity(int d_max, int k_max, const CommonOpts& c) {
    if (c.format == "csv") throw std::invalid_argument("no plot series for this subcommand");
    json failures = json::array();
    int checked = 0;
    for (int d = 0; d <= d_max; ++d)
        for (int k = 0; k <= k_max; ++k) {
            ++checked;
            if (!grr::binomial_identity_check(d, k))
                failures.push_back(json::array({d, k}));
        }
    bool ok = failures.empty();
    OutputSink sink{c.output};
    if (c.format == "text") {
        std::ostringstream ss;
        ss << checked << " identities checked, " << (ok ? "all hold" : "FAILURES") << "\n";
        sink.write(ss.str());
        return ok ? kExitOk : kExitNotFound;
    }
    json out;
    out["d_max"] = d_max;
    out["k_max"] = k_max;
    out["checked"] = checked;
    out["all_hold"] = ok;
    out["failures"] = std::move(failures);
    sink.write_json(out);
    return ok ? kExitOk : kExitNotFound;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"computations around round and vanishing restrictions of polynomials"};
    app.require_subcommand(1);

    CommonOpts c;
    int d = 0, k = 0, m = 1, n = -1;
    std::string field = "real", mode, poly_file, bodies, schedule;
    std::vector<std::string> polys;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", c.seed, "random seed (default 0)");
        sub->add_option("--tol", c.tol, "success tolerance (default 1e-8)");
        sub->add_option("--restarts", c.restarts, "restart budget (default 100)");
        sub->add_option("--output", c.output, "write to file instead of stdout");
        sub->add_option("--format", c.format, "json, csv, or text (default json)")
            ->check(CLI::IsMember({"json", "csv", "text"}));
    };

    CLI::App* obstruction = app.add_subcommand(
        "obstruction", "top characteristic class of the symmetric power and its minimal n");
    obstruction->add_option("--d", d, "form degree")->required();
    obstruction->add_option("--k", k, "subspace dimension")->required();
    obstruction->add_option("--field", field, "real or complex");
    obstruction->add_option("--n", n, "also report survival at this ambient dimension");
    add_common(obstruction);

    CLI::App* bounds = app.add_subcommand("bounds", "ambient-dimension bounds");
    bounds->add_option("--d", d, "form degree")->required();
    bounds->add_option("--k", k, "subspace dimension")->required();
    bounds->add_option("--m", m, "number of simultaneous forms (default 1)");
    add_common(bounds);

    CLI::App* orbits = app.add_subcommand("orbits", "binary-tree group orbits of unit-vector multisets");
    orbits->add_option("--d", d, "multiset cardinality")->required();
    orbits->add_option("--n", n, "tree height")->required();
    add_common(orbits);

    CLI::App* cubature = app.add_subcommand(
        "cubature", "similarity-transform cubature reproducing rotation averages");
    cubature->add_option("--k", k, "number of variables")->required();
    cubature->add_option("--d", d, "form degree")->required();
    cubature->add_option("--poly", polys, "input polynomial (repeatable)");
    cubature->add_option("--poly-file", poly_file, "file with one polynomial per line");
    add_common(cubature);

    CLI::App* forms = app.add_subcommand(
        "forms", "recursive linear-form family with round invariant restrictions");
    forms->add_option("--k", k, "number of variables")->required();
    forms->add_option("--d", d, "even form degree")->required();
    forms->add_option("--schedule", schedule, "block sizes, e.g. 1,4,16")->required();
    add_common(forms);

    CLI::App* search = app.add_subcommand(
        "search", "subspace search for zero or round restrictions");
    search->add_option("--mode", mode, "odd-zero or even-round")->required();
    search->add_option("--k", k, "subspace dimension")->required();
    search->add_option("--field", field, "real or complex");
    search->add_option("--n", n, "ambient dimension (default: inferred)");
    search->add_option("--poly", polys, "input polynomial (repeatable)");
    search->add_option("--poly-file", poly_file, "file with one polynomial per line");
    add_common(search);

    CLI::App* quadratic = app.add_subcommand(
        "quadratic", "exact round subspace of a quadratic form");
    quadratic->add_option("--k", k, "subspace dimension")->required();
    quadratic->add_option("--n", n, "matrix size (default 2k-1)");
    quadratic->add_option("--poly", polys, "quadratic form (default: seeded random matrix)");
    quadratic->add_option("--poly-file", poly_file, "file with the quadratic form");
    add_common(quadratic);

    CLI::App* sections = app.add_subcommand(
        "sections", "search for frames with round projected/sectioned bodies");
    sections->add_option("--bodies", bodies, "JSON file with bodies")->required();
    sections->add_option("--k", k, "subspace dimension")->required();
    sections->add_option("--mode", mode,
                         "projection, section, projection-john, or section-john");
    add_common(sections);

    CLI::App* verify = app.add_subcommand(
        "verify", "rebuild recursive forms and verify round restrictions");
    verify->add_option("--k", k, "number of variables")->required();
    verify->add_option("--d", d, "even form degree")->required();
    verify->add_option("--schedule", schedule, "block sizes, e.g. 1,4,16")->required();
    verify->add_option("--m", m, "number of random coefficient sets (default 5)");
    add_common(verify);

    CLI::App* identity = app.add_subcommand("identity", "binomial-sum identity sweep");
    identity->add_option("--d", d, "max degree (default 8)");
    identity->add_option("--k", k, "max dimension (default 8)");
    add_common(identity);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return kExitUsage;
    }

    try {
        const auto parsed = app.get_subcommands();
        c.tol_given = !parsed.empty() && parsed[0]->count("--tol") > 0;
        if (app.got_subcommand(obstruction))
            return run_obstruction(d, k, field, n, c);
        if (app.got_subcommand(bounds)) return run_bounds(d, k, m, c);
        if (app.got_subcommand(orbits)) return run_orbits(d, n, c);
        if (app.got_subcommand(cubature))
            return run_cubature(k, d, gather_poly_texts(polys, poly_file), c);
        if (app.got_subcommand(forms)) return run_forms(k, d, schedule, c);
        if (app.got_subcommand(search))
            return run_search(mode.empty() ? "odd-zero" : mode, field, k, n,
                              gather_poly_texts(polys, poly_file), c);
        if (app.got_subcommand(quadratic))
            return run_quadratic(k, n, gather_poly_texts(polys, poly_file), c);
        if (app.got_subcommand(sections))
            return run_sections(bodies, k, mode.empty() ? "projection" : mode, c);
        if (app.got_subcommand(verify))
            return run_verify(k, d, schedule, verify->count("--m") > 0 ? m : 5, c);
        if (app.got_subcommand(identity))
            return run_identity(d > 0 ? d : 8, k > 0 ? k : 8, c);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNotFound;
    }
    return kExitUsage;
}
