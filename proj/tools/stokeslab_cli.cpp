// Batch front door: JSON-configured runs of the laboratory's verifications,
// JSON/CSV reports with deterministic serialization.
//
// Exit codes: 0 = all residuals within tolerance, 1 = tolerance failure,
// 2 = validation/configuration failure (machine-readable JSON on stderr).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stokeslab/isomonodromy.hpp"
#include "stokeslab/poisson.hpp"
#include "stokeslab/quantum.hpp"

using json = nlohmann::ordered_json;
using namespace stokeslab;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// serialization: complex numbers as [re, im], matrices row-major nested

static double fix17(double x) {
    // normalize through a fixed 17-significant-digit decimal form so the
    // serialized report is reproducible byte for byte
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::strtod(buf, nullptr);
}

static json c2j(cplx z) { return json::array({fix17(z.real()), fix17(z.imag())}); }

static json m2j(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (int j = 0; j < m.cols(); ++j) r.push_back(c2j(m(i, j)));
        rows.push_back(r);
    }
    return rows;
}

static cplx j2c(const json& v) {
    if (v.is_number()) return cplx(v.get<double>(), 0.0);
    return cplx(v.at(0).get<double>(), v.at(1).get<double>());
}

static Mat j2m(const json& v) {
    int n = (int)v.size();
    Mat m((int)n, (int)v.at(0).size());
    for (int i = 0; i < (int)m.rows(); ++i)
        for (int j = 0; j < (int)m.cols(); ++j) m(i, j) = j2c(v.at(i).at(j));
    return m;
}

static Mat diag_from(const json& v) {
    int n = (int)v.size();
    Mat m = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = j2c(v.at(i));
    return m;
}

// matrices are nested rows of [re, im] pairs; a flat list of numbers is the
// shorthand for a real diagonal matrix
static Mat get_matrix(const json& cfg, const std::string& key) {
    const json& v = cfg.at(key);
    if (v.empty()) throw ValidationError("empty matrix for " + key);
    if (v.at(0).is_number()) return diag_from(v);
    if (!v.at(0).empty() && v.at(0).at(0).is_array()) return j2m(v);
    throw ValidationError("matrix " + key +
                          " must be rows of [re, im] pairs or a flat "
                          "real diagonal");
}

static Mat random_matrix(std::mt19937_64& rng, int n, double scale) {
    std::normal_distribution<double> g;
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = scale * cplx(g(rng), g(rng));
    return m;
}

// ---------------------------------------------------------------------------
// run context

struct Ctx {
    json cfg;          // resolved config (defaults merged), echoed in reports
    std::string out;   // output directory
    double tol_scale = 1.0;
    std::string precision = "double";

    double tol(const std::string& name, double dflt) const {
        double base = dflt;
        if (cfg.contains("tolerances") && cfg["tolerances"].contains(name))
            base = cfg["tolerances"][name].get<double>();
        return base * tol_scale;
    }
    uint64_t seed() const { return cfg.value("seed", (uint64_t)1); }
};

static void merge_defaults(json& cfg, const json& defaults) {
    for (auto it = defaults.begin(); it != defaults.end(); ++it)
        if (!cfg.contains(it.key())) cfg[it.key()] = it.value();
}

static void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        os << text;
    }
    fs::rename(tmp, path);
}

// long-format plot CSV from the report's "plot" section
static std::string emit_plot_data(const json& report) {
    std::ostringstream os;
    os << "series,x,y\n";
    if (!report.contains("plot") || !report["plot"].contains("series"))
        return os.str();
    for (const json& s : report["plot"]["series"]) {
        const std::string name = s["name"].get<std::string>();
        const json& xs = s["x"];
        const json& ys = s["y"];
        os.precision(17);
        for (size_t k = 0; k < xs.size(); ++k)
            os << name << "," << xs.at(k).get<double>() << ","
               << ys.at(k).get<double>() << "\n";
    }
    return os.str();
}

static int finish(const Ctx& ctx, const std::string& command, json& report,
                  bool pass) {
    report["pass"] = pass;
    std::string text = report.dump(2) + "\n";
    write_text(fs::path(ctx.out) / (command + "_report.json"), text);
    write_text(fs::path(ctx.out) / (command + "_plot.csv"),
               emit_plot_data(report));
    std::cout << text;
    return pass ? 0 : 1;
}

static json report_head(const Ctx& ctx, const std::string& command) {
    json r;
    r["schema_version"] = 1;
    r["command"] = command;
    r["precision"] = ctx.precision;
    r["conventions"] = {
        {"kappa", c2j(cplx(-1.0, 0.0))},
        {"sigma", ISO_FLOW_SIGN},
        {"r_matrix", "omega_plus + omega_cartan/2"},
        {"nu_check", "lambda -> -lambda / (2 pi i)"},
    };
    r["config"] = ctx.cfg;
    return r;
}

// ---------------------------------------------------------------------------
// engine-backed commands, templated on the working precision

template <class Real>
struct EngineData {
    Mat s_plus, s_minus, conn_matrix;
    double monodromy, big_cell;
    StokesEngine<Real> engine;

    explicit EngineData(const Connection& c)
        : engine(c, IntegratorConfig{}) {
        s_plus = engine.stokes_plus();
        s_minus = engine.stokes_minus();
        conn_matrix = engine.connection_matrix();
        monodromy = engine.monodromy_residual();
        big_cell = engine.big_cell_residual();
    }
};

static Connection connection_from(const Ctx& ctx) {
    Connection c;
    c.A = get_matrix(ctx.cfg, "A");
    c.B = get_matrix(ctx.cfg, "B");
    c.ray = ctx.cfg.value("ray", -PI / 2);
    c.cut = ctx.cfg.value("cut", PI);
    return c;
}

template <class Real>
static int cmd_stokes_impl(const Ctx& ctx) {
    Connection c = connection_from(ctx);
    EngineData<Real> ed(c);
    auto pattern = positive_roots_for_ray(c.A, c.ray);
    std::vector<Root> neg;
    for (const Root& a : pattern) neg.push_back({a.j, a.i});

    json rep = report_head(ctx, "stokes");
    rep["s_plus"] = m2j(ed.s_plus);
    rep["s_minus"] = m2j(ed.s_minus);
    rep["connection_matrix"] = m2j(ed.conn_matrix);
    double pat = std::max(pattern_residual(ed.s_plus, pattern),
                          pattern_residual(ed.s_minus, neg));
    rep["residuals"] = {
        {"monodromy", fix17(ed.monodromy)},
        {"pattern", fix17(pat)},
    };
    int n = (int)c.A.rows();
    rep["s_plus_is_identity"] =
        (ed.s_plus - Mat::Identity(n, n)).norm() < 1e-9;
    rep["s_minus_is_identity"] =
        (ed.s_minus - Mat::Identity(n, n)).norm() < 1e-9;
    bool pass = ed.monodromy < ctx.tol("monodromy", 1e-7) &&
                pat < ctx.tol("pattern", 1e-6);
    return finish(ctx, "stokes", rep, pass);
}

template <class Real>
static int cmd_factors_impl(const Ctx& ctx) {
    Connection c = connection_from(ctx);
    StokesEngine<Real> eng(c, IntegratorConfig{});
    double from = ctx.cfg.value("from", c.ray);
    double to = ctx.cfg.value("to", c.ray + PI);
    auto fs = eng.factors(from, to);
    auto prod = eng.product_of_factors(fs);
    auto direct = eng.transition(from, to);
    double resid = (prod.S - direct.S).norm();

    json rep = report_head(ctx, "factors");
    json flist = json::array();
    for (const auto& f : fs)
        flist.push_back({{"ray_angle", fix17(f.ray_angle)},
                         {"eps", f.eps},
                         {"S", m2j(f.S)}});
    rep["factors"] = flist;
    rep["eps_total"] = prod.eps;
    rep["residuals"] = {{"product_vs_transition", fix17(resid)}};
    bool pass = resid < ctx.tol("factorization", 1e-6) &&
                prod.eps == direct.eps;
    return finish(ctx, "factors", rep, pass);
}

template <class Real>
static int cmd_monodromy_impl(const Ctx& ctx) {
    Connection c = connection_from(ctx);
    require_nonresonant(c.B);  // precise precondition, ResonantB on failure
    EngineData<Real> ed(c);
    json rep = report_head(ctx, "monodromy");
    rep["residuals"] = {{"monodromy", fix17(ed.monodromy)}};
    return finish(ctx, "monodromy", rep,
                  ed.monodromy < ctx.tol("monodromy", 1e-7));
}

template <class Real>
static int cmd_stokes_map_impl(const Ctx& ctx) {
    Connection c = connection_from(ctx);
    StokesEngine<Real> eng(c, IntegratorConfig{});
    auto bp = eng.stokes_map();
    double cell = eng.big_cell_residual();
    json rep = report_head(ctx, "stokes-map");
    rep["b_plus"] = m2j(bp.b_plus);
    rep["b_minus"] = m2j(bp.b_minus);
    rep["residuals"] = {{"big_cell", fix17(cell)}};
    return finish(ctx, "stokes-map", rep, cell < ctx.tol("big_cell", 1e-6));
}

template <int (*F)(const Ctx&), int (*G)(const Ctx&)>
static int dispatch_precision(const Ctx& ctx) {
    return ctx.precision == "extended" ? G(ctx) : F(ctx);
}

// ---------------------------------------------------------------------------
// verification commands

static std::vector<std::pair<Poly, Poly>> observable_pairs(int n) {
    // ten pairs mixing b+ / b- coordinates and degree-2 products
    std::vector<Poly> vars;
    vars.push_back(Poly::variable(bplus_var(n, 1, 0)));
    vars.push_back(Poly::variable(bplus_var(n, 0, 0)));
    vars.push_back(Poly::variable(bplus_var(n, 1, 1)));
    vars.push_back(Poly::variable(bminus_var(n, 0, 1)));
    vars.push_back(Poly::variable(bminus_var(n, 0, 0)));
    if (n > 2) {
        vars.push_back(Poly::variable(bplus_var(n, 2, 0)));
        vars.push_back(Poly::variable(bminus_var(n, 1, 2)));
    }
    std::vector<std::pair<Poly, Poly>> pairs;
    for (size_t i = 0; i < vars.size() && pairs.size() < 8; ++i)
        for (size_t j = i + 1; j < vars.size() && pairs.size() < 8; ++j)
            pairs.emplace_back(vars[i], vars[j]);
    pairs.emplace_back(vars[0], vars[3] * vars[3]);
    pairs.emplace_back(vars[1] * vars[0], vars[3]);
    return pairs;
}

static int cmd_poisson_verify(const Ctx& ctx) {
    int n = ctx.cfg.value("n", 2);
    SigmaConfig sc;
    sc.A = ctx.cfg.contains("A") ? get_matrix(ctx.cfg, "A") : [&] {
        Mat a = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i) a(i, i) = -2.0 + i * 0.9;
        return a;
    }();
    int samples = ctx.cfg.value("samples", 2);
    double bound = ctx.cfg.value("norm_bound", 0.15);
    std::mt19937_64 rng(ctx.seed());
    std::vector<Mat> lams;
    for (int s = 0; s < samples; ++s)
        lams.push_back(random_matrix(rng, n, bound));
    auto pairs = observable_pairs(n);
    auto positive = positive_roots_for_ray(sc.A, sc.ray);

    DualBracket unit_db(n, positive);
    Calibration cal = calibrate_kappa(sc, unit_db, lams, pairs);
    DualBracket db(n, positive, cal.kappa);

    // residual table
    std::ostringstream csv;
    csv << "point,pair,lhs_re,lhs_im,rhs_re,rhs_im,residual\n";
    csv.precision(17);
    double worst = 0.0, scale = 1.0;
    std::vector<std::vector<cplx>> rows;
    for (size_t p = 0; p < lams.size(); ++p) {
        SigmaDifferential J = sigma_differential(sc, lams[p]);
        for (size_t q = 0; q < pairs.size(); ++q) {
            cplx lhs = pushforward_kks(pairs[q].first, pairs[q].second, J,
                                       lams[p]);
            cplx rhs = db.eval(pairs[q].first, pairs[q].second, J.base);
            scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
            rows.push_back({cplx((double)p), cplx((double)q), lhs, rhs});
        }
    }
    for (const auto& row : rows) {
        double resid = std::abs(row[2] - row[3]) / scale;
        worst = std::max(worst, resid);
        csv << (int)row[0].real() << "," << (int)row[1].real() << ","
            << row[2].real() << "," << row[2].imag() << "," << row[3].real()
            << "," << row[3].imag() << "," << resid << "\n";
    }
    write_text(fs::path(ctx.out) / "poisson_verify_table.csv", csv.str());

    json rep = report_head(ctx, "poisson-verify");
    rep["calibration"] = {{"kappa", c2j(cal.kappa)},
                          {"spread", fix17(cal.spread)},
                          {"fit_residual", fix17(cal.fit_residual)}};
    rep["residuals"] = {{"max_bracket_residual", fix17(worst)}};
    rep["table_csv"] = "poisson_verify_table.csv";
    bool pass = worst < ctx.tol("poisson", 1e-3) && cal.spread < 1e-3;
    return finish(ctx, "poisson-verify", rep, pass);
}

static int cmd_twist_order1(const Ctx& ctx) {
    Mat mu = ctx.cfg.contains("mu") ? get_matrix(ctx.cfg, "mu") : [] {
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = 1.0;
        return m;
    }();
    json rep = report_head(ctx, "twist-order1");
    double worst = 0.0;
    for (int family : {+1, -1}) {
        Tensor2 jq = dkz_twist_order1(mu, family);
        Tensor2 jc = closed_form_twist(mu, family);
        double resid = (jq - jc).norm() / std::max(1.0, jc.norm());
        worst = std::max(worst, resid);
        rep["residuals"][family > 0 ? "j_plus" : "j_minus"] = fix17(resid);
    }
    // quadrature convergence curve for the plot output
    json xs = json::array(), ys = json::array();
    for (int panels : {4, 8, 16}) {
        TwistQuadrature q;
        q.panels = panels;
        q.check_tol = 1.0;  // the curve itself shows the convergence
        double r = (dkz_twist_order1(mu, +1, q) - closed_form_twist(mu, +1))
                       .norm();
        xs.push_back(panels);
        ys.push_back(fix17(r));
    }
    rep["plot"] = {{"series", json::array({json{{"name", "twist_quadrature"},
                                                {"x", xs},
                                                {"y", ys}}})}};
    return finish(ctx, "twist-order1", rep, worst < ctx.tol("twist", 1e-6));
}

static int cmd_quantum_stokes_order1(const Ctx& ctx) {
    Mat mu = ctx.cfg.contains("mu") ? get_matrix(ctx.cfg, "mu") : [] {
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = 1.0;
        return m;
    }();
    int n = (int)mu.rows();
    QuantumStokes qs = quantum_stokes_order1(mu);
    auto positive = positive_roots_for_chamber(mu);
    double routes = std::max((qs.s_plus - qs.s_plus_direct).norm(),
                             (qs.s_minus - qs.s_minus_direct).norm());
    double swap21 = (qs.s_minus - qs.s_plus.swapped()).norm();
    double rmat = (rmatrix_order1(qs) - standard_r(n, positive)).norm();
    double mono = monodromy_identity_residual_order1(mu, qs);

    json rep = report_head(ctx, "quantum-stokes-order1");
    rep["residuals"] = {{"routes", fix17(routes)},
                        {"s_minus_vs_s_plus_swapped", fix17(swap21)},
                        {"r_matrix", fix17(rmat)},
                        {"monodromy_identity", fix17(mono)}};
    double t = ctx.tol("quantum", 1e-6);
    bool pass = routes < t && swap21 < t && rmat < t && mono < t;
    return finish(ctx, "quantum-stokes-order1", rep, pass);
}

static int cmd_scl_check(const Ctx& ctx) {
    Mat mu = ctx.cfg.contains("mu") ? get_matrix(ctx.cfg, "mu") : [] {
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = 1.0;
        return m;
    }();
    int n = (int)mu.rows();
    int dirs = ctx.cfg.value("directions", 6);
    std::mt19937_64 rng(ctx.seed());
    std::vector<Mat> lams;
    for (int s = 0; s < dirs; ++s) lams.push_back(random_matrix(rng, n, 0.5));

    QuantumStokes qs = quantum_stokes_order1(mu);
    Tensor2 jp = dkz_twist_order1(mu, +1);
    double rs = scl_stokes_residual(mu, qs.s_plus, lams);
    double rt = scl_twist_residual(mu, jp, lams);

    // step-size series for the plot: second-order finite differences
    json xs = json::array(), ys = json::array();
    for (double h : {2e-2, 1e-2, 5e-3}) {
        SclCheckConfig cfg;
        cfg.fd_step = h;
        xs.push_back(fix17(h));
        ys.push_back(fix17(scl_stokes_residual(mu, qs.s_plus, {lams[0]}, cfg)));
    }
    json rep = report_head(ctx, "scl-check");
    rep["residuals"] = {{"stokes", fix17(rs)}, {"twist", fix17(rt)}};
    rep["plot"] = {{"series", json::array({json{{"name", "scl_fd_step"},
                                                {"x", xs},
                                                {"y", ys}}})}};
    double t = ctx.tol("scl", 1e-4);
    return finish(ctx, "scl-check", rep, rs < t && rt < t);
}

static int cmd_iso_flow(const Ctx& ctx) {
    Mat mu0 = ctx.cfg.contains("mu0") ? get_matrix(ctx.cfg, "mu0") : [] {
        Mat m = Mat::Zero(3, 3);
        m(0, 0) = -2.0;
        m(1, 1) = -1.0;
        return m;
    }();
    Mat dir = ctx.cfg.contains("mu_dir") ? get_matrix(ctx.cfg, "mu_dir") : [&] {
        Mat m = Mat::Zero(mu0.rows(), mu0.cols());
        m(0, 0) = -1.0;
        return m;
    }();
    int n = (int)mu0.rows();
    std::mt19937_64 rng(ctx.seed());
    Mat B0 = ctx.cfg.contains("B") ? get_matrix(ctx.cfg, "B")
                                   : random_matrix(rng, n, 0.15);
    IsoFlowConfig fc;
    fc.steps = ctx.cfg.value("steps", 500);
    fc.checkpoints = ctx.cfg.value("checkpoints", 11);
    double t0 = ctx.cfg.value("t0", 0.0), t1 = ctx.cfg.value("t1", 0.5);
    auto path = [&](double t) { return (mu0 + t * dir).eval(); };
    auto traj = iso_flow(path, B0, t0, t1, fc);

    std::ostringstream tcsv;
    write_trajectory_csv(tcsv, traj);
    write_text(fs::path(ctx.out) / "iso_flow_trajectory.csv", tcsv.str());

    // drift per checkpoint
    StokesEngine<double> eng0(Connection{traj.front().mu, traj.front().B});
    Mat sp0 = eng0.stokes_plus(), sm0 = eng0.stokes_minus();
    json xs = json::array(), ys = json::array();
    double drift = 0.0;
    for (const FlowState& st : traj) {
        StokesEngine<double> eng(Connection{st.mu, st.B});
        double d = std::max((eng.stokes_plus() - sp0).norm(),
                            (eng.stokes_minus() - sm0).norm());
        drift = std::max(drift, d);
        xs.push_back(fix17(st.t));
        ys.push_back(fix17(d));
    }
    double eig = eigenvalue_drift(traj);
    json rep = report_head(ctx, "iso-flow");
    rep["residuals"] = {{"stokes_drift", fix17(drift)},
                        {"eigenvalue_drift", fix17(eig)}};
    rep["trajectory_csv"] = "iso_flow_trajectory.csv";
    rep["plot"] = {{"series", json::array({json{{"name", "stokes_drift"},
                                                {"x", xs},
                                                {"y", ys}}})}};
    bool pass =
        drift < ctx.tol("drift", 1e-6) && eig < ctx.tol("eigenvalue", 1e-8);
    return finish(ctx, "iso-flow", rep, pass);
}

static int cmd_pde_check(const Ctx& ctx) {
    Mat mu0 = ctx.cfg.contains("mu0") ? get_matrix(ctx.cfg, "mu0") : [] {
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = -2.0;
        m(1, 1) = -1.0;
        return m;
    }();
    int n = (int)mu0.rows();
    std::mt19937_64 rng(ctx.seed());
    Mat B = ctx.cfg.contains("B") ? get_matrix(ctx.cfg, "B")
                                  : random_matrix(rng, n, 0.2);
    Mat v = Mat::Zero(n, n);
    v(0, 0) = -1.0;
    v(n - 1, n - 1) = 0.3;
    double worst = 0.0;
    int grid = ctx.cfg.value("grid", 3);
    for (int gidx = 0; gidx < grid; ++gidx) {
        Mat mu = mu0;
        mu(0, 0) -= 0.2 * gidx;
        worst = std::max(worst, classical_pde_residual(mu, B, v));
    }
    json rep = report_head(ctx, "pde-check");
    rep["residuals"] = {{"pde", fix17(worst)}};
    return finish(ctx, "pde-check", rep, worst < ctx.tol("pde", 1e-4));
}

static int cmd_duality(const Ctx& ctx) {
    int n = ctx.cfg.value("n", 2);
    int count = ctx.cfg.value("samples", 50);
    std::mt19937_64 rng(ctx.seed());
    std::uniform_int_distribution<int> pick(0, n * n - 1);
    std::normal_distribution<double> g;

    int agreements = 0;
    for (int trial = 0; trial < count; ++trial) {
        pbw::Series s = pbw::Series::zero(n, 1, 2);
        s.c[0].add({{}}, cplx(g(rng), g(rng)));
        s.c[1].add({{pick(rng)}}, cplx(g(rng), g(rng)));
        pbw::Element q = pbw::normal_form(n, {pick(rng), pick(rng)},
                                          cplx(g(rng), g(rng)));
        for (const auto& [m, c] : q.terms)
            s.c[trial % 2 == 1 ? 1 : 2].add({m}, c);
        pbw::MembershipWitness w = pbw::uprime_membership(s);
        if (w.delta_criterion == w.filtration_criterion) ++agreements;
    }

    // exact fixtures for the tensor components
    bool fixtures = true;
    {
        pbw::Series s1 = pbw::Series::zero(n, 1, 1);
        s1.c[1].add({{0 * n + 1}}, 1.0);
        pbw::IDeltaComponents c1 = pbw::i_delta(s1, 2);
        fixtures = fixtures && c1.c0 == cplx(0.0) &&
                   c1.higher[0].terms.size() == 1 &&
                   c1.higher[0].terms.count({{0 * n + 1}}) == 1 &&
                   c1.higher[1].is_zero();
        pbw::Series s2 = pbw::Series::zero(n, 1, 2);
        s2.c[2].add({{0 * n + 1, 1 * n + 0}}, 1.0);
        pbw::IDeltaComponents c2 = pbw::i_delta(s2, 2);
        fixtures = fixtures && c2.higher[0].is_zero() &&
                   c2.higher[1].terms.size() == 2 &&
                   c2.higher[1].terms.at({{0 * n + 1}, {1 * n + 0}}) ==
                       cplx(1.0) &&
                   c2.higher[1].terms.at({{1 * n + 0}, {0 * n + 1}}) ==
                       cplx(1.0);
    }
    json rep = report_head(ctx, "duality");
    rep["membership_agreements"] = agreements;
    rep["membership_samples"] = count;
    rep["fixtures_exact"] = fixtures;
    rep["residuals"] = json::object();
    return finish(ctx, "duality", rep, agreements == count && fixtures);
}

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    CLI::App app{"Stokes-data laboratory batch runner"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", precision = "double";
    uint64_t seed = 0;
    bool seed_set = false;
    double tol_scale = 1.0;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_dir, "output directory for reports");
    auto* seed_opt = app.add_option("--seed", seed, "PRNG seed (std::mt19937_64)");
    app.add_option("--tol-scale", tol_scale, "multiply all tolerances");
    app.add_option("--precision", precision, "double or extended")
        ->check(CLI::IsMember({"double", "extended"}));

    static const std::vector<std::string> commands = {
        "stokes",       "factors",   "monodromy",
        "stokes-map",   "poisson-verify", "twist-order1",
        "quantum-stokes-order1", "scl-check", "iso-flow",
        "pde-check",    "duality"};
    for (const std::string& c : commands)
        app.add_subcommand(c, "")->fallthrough();

    CLI11_PARSE(app, argc, argv);
    seed_set = seed_opt->count() > 0;
    std::string command = app.get_subcommands().front()->get_name();

    try {
        Ctx ctx;
        ctx.out = out_dir;
        ctx.tol_scale = tol_scale;
        ctx.precision = precision;
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw ValidationError("cannot read config: " + config_path);
            is >> ctx.cfg;
        } else {
            ctx.cfg = json::object();
        }
        if (seed_set) ctx.cfg["seed"] = seed;
        // defaults for connection-based commands
        if (command == "stokes" || command == "factors" ||
            command == "monodromy" || command == "stokes-map") {
            json dfl;
            dfl["A"] = json::array({-2.0, -1.0});
            dfl["B"] = json::array(
                {json::array({json::array({0.05, 0.02}),
                              json::array({0.12, -0.03})}),
                 json::array({json::array({-0.08, 0.04}),
                              json::array({-0.02, 0.06})})});
            dfl["ray"] = -PI / 2;
            dfl["cut"] = PI;
            merge_defaults(ctx.cfg, dfl);
        }
        merge_defaults(ctx.cfg, json{{"seed", 1}});

        if (command == "stokes")
            return dispatch_precision<cmd_stokes_impl<double>,
                                      cmd_stokes_impl<long double>>(ctx);
        if (command == "factors")
            return dispatch_precision<cmd_factors_impl<double>,
                                      cmd_factors_impl<long double>>(ctx);
        if (command == "monodromy")
            return dispatch_precision<cmd_monodromy_impl<double>,
                                      cmd_monodromy_impl<long double>>(ctx);
        if (command == "stokes-map")
            return dispatch_precision<cmd_stokes_map_impl<double>,
                                      cmd_stokes_map_impl<long double>>(ctx);
        if (command == "poisson-verify") return cmd_poisson_verify(ctx);
        if (command == "twist-order1") return cmd_twist_order1(ctx);
        if (command == "quantum-stokes-order1")
            return cmd_quantum_stokes_order1(ctx);
        if (command == "scl-check") return cmd_scl_check(ctx);
        if (command == "iso-flow") return cmd_iso_flow(ctx);
        if (command == "pde-check") return cmd_pde_check(ctx);
        if (command == "duality") return cmd_duality(ctx);
        throw ValidationError("unknown command: " + command);
    } catch (const Error& e) {
        json err = {{"error", {{"code", e.code()}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        json err = {
            {"error", {{"code", "ValidationError"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
}
