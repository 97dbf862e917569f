#include "quantcub/cubature.hpp"
#include "quantcub/distribution.hpp"
#include "quantcub/experiments.hpp"
#include "quantcub/grid_store.hpp"
#include "quantcub/product_quant.hpp"
#include "quantcub/quantizer.hpp"
#include "quantcub/varred.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using nlohmann::ordered_json;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 12345;
    std::string out;
    std::string format = "csv";
    std::string grid_store;
};

void emit(const GlobalOpts& g, const std::string& text) {
    if (g.out.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream f(g.out);
    if (!f) throw std::runtime_error("cannot open output file: " + g.out);
    f << text;
}

qcub::GridStore make_store(const GlobalOpts& g) {
    if (!g.grid_store.empty()) return qcub::GridStore{g.grid_store};
    if (const char* env = std::getenv("QC_GRID_STORE"); env && *env)
        return qcub::GridStore{env};
    return qcub::GridStore{};
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Named 1D test functions: one | x | x2 | call:K | put:K | digital:K | abspow:a
qcub::Fn1D parse_function(const std::string& name) {
    const auto colon = name.find(':');
    const std::string head = name.substr(0, colon);
    double p = 0.0;
    if (colon != std::string::npos) p = std::stod(name.substr(colon + 1));
    if (head == "one") return [](double) { return 1.0; };
    if (head == "x") return [](double x) { return x; };
    if (head == "x2") return [](double x) { return x * x; };
    if (head == "call") return [p](double x) { return std::max(x - p, 0.0); };
    if (head == "put") return [p](double x) { return std::max(p - x, 0.0); };
    if (head == "digital") return [p](double x) { return x > p ? 1.0 : 0.0; };
    if (head == "abspow") return [p](double x) { return std::pow(std::fabs(x), p); };
    throw std::invalid_argument("unknown function '" + name + "'");
}

std::vector<int> parse_levels(const std::string& csv) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        auto next = csv.find(',', pos);
        if (next == std::string::npos) next = csv.size();
        out.push_back(std::stoi(csv.substr(pos, next - pos)));
        pos = next + 1;
    }
    if (out.empty()) throw std::invalid_argument("empty level list");
    return out;
}

std::string grid_json(const qcub::QuantizerGrid& g) {
    ordered_json j;
    j["dist"] = g.dist.to_string();
    j["n"] = g.level();
    j["distortion"] = g.distortion;
    j["points"] = g.points;
    j["weights"] = g.weights;
    return j.dump() + "\n";
}

std::string grid_csv(const qcub::QuantizerGrid& g) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "# dist=%s N=%d distortion=%.17g\n",
                  g.dist.to_string().c_str(), g.level(), g.distortion);
    std::string out = buf;
    for (int i = 0; i < g.level(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", g.points[i], g.weights[i]);
        out += buf;
    }
    return out;
}

std::string report_csv(const qcub::EstimatorReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%.8g,%.8g,%.8g\n", r.estimator.c_str(), r.mean,
                  r.half_width_95, r.empirical_mse);
    return buf;
}

ordered_json report_json(const qcub::EstimatorReport& r) {
    ordered_json j;
    j["estimator"] = r.estimator;
    j["mean"] = r.mean;
    j["half_width_95"] = r.half_width_95;
    j["mse"] = r.empirical_mse;
    j["n_replications"] = r.n_replications;
    j["samples_per_replication"] = r.samples_per_replication;
    j["variance_ratio_vs_crude"] = r.variance_ratio_vs_crude;
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"1D optimal quantization, cubature and quantized control variates"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "RNG seed");
    app.add_option("--out", g.out, "output file (default: stdout)");
    app.add_option("--format", g.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--grid-store", g.grid_store, "grid cache directory");

    // quantize
    auto* quantize = app.add_subcommand("quantize", "build an optimal grid");
    std::string q_dist = "normal:0,1";
    int q_n = 100;
    double q_tol = 1e-11;
    quantize->add_option("--dist", q_dist, "distribution spec, e.g. normal:0,1");
    quantize->add_option("--n", q_n, "grid size")->required();
    quantize->add_option("--tol", q_tol, "gradient tolerance factor");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "validate and summarize a grid file");
    std::string i_file;
    inspect->add_option("--grid", i_file, "grid CSV file")->required();

    // cubature
    auto* cub = app.add_subcommand("cubature", "quantized expectation of a named function");
    std::string c_dist = "normal:0,1", c_f = "one";
    int c_n = 100;
    std::optional<double> c_ref;
    cub->add_option("--dist", c_dist);
    cub->add_option("--f", c_f, "one|x|x2|call:K|put:K|digital:K|abspow:a");
    cub->add_option("--n", c_n)->required();
    cub->add_option("--ref", c_ref, "reference value for the error column");

    // rr
    auto* rr = app.add_subcommand("rr", "Richardson-Romberg extrapolated cubature");
    std::string r_dist = "normal:0,1", r_f = "x2";
    int r_n = 100;
    double r_ratio = 1.2;
    std::optional<double> r_ref;
    rr->add_option("--dist", r_dist);
    rr->add_option("--f", r_f);
    rr->add_option("--n", r_n)->required();
    rr->add_option("--ratio", r_ratio);
    rr->add_option("--ref", r_ref);

    // price
    auto* price = app.add_subcommand("price", "built-in pricing benchmarks");
    std::string p_exp = "call", p_basis = "lognormal", p_levels;
    int p_n = 500;
    double p_k = 2.0, p_ratio = 1.2;
    bool p_rr = false;
    price->add_option("--experiment", p_exp, "call|put-on-call|exchange-spread")
        ->check(CLI::IsMember({"call", "put-on-call", "exchange-spread"}));
    price->add_option("--basis", p_basis, "gaussian or lognormal grids")
        ->check(CLI::IsMember({"gaussian", "lognormal"}));
    price->add_option("--n", p_n, "grid size");
    price->add_option("--levels", p_levels, "comma-separated sizes for a rate study");
    price->add_option("--k", p_k, "scaling exponent for the rate study");
    price->add_flag("--rr", p_rr, "use Richardson-Romberg extrapolation");
    price->add_option("--ratio", p_ratio, "extrapolation level ratio");

    // mc-cv
    auto* mccv = app.add_subcommand("mc-cv", "basket Monte Carlo with quantized control variates");
    int m_d = 2, m_nq = 200, m_m = 10000, m_reps = 128;
    std::string m_basis = "lognormal";
    bool m_crude = false, m_lambda_zero = false, m_pilot = false;
    double m_strike = 120.0, m_rate = 0.02, m_rho = 0.5, m_t = 1.0, m_spot = 100.0;
    std::optional<double> m_ref;
    mccv->add_option("--d", m_d, "number of assets");
    mccv->add_option("--n-quant", m_nq, "control-variate grid size");
    mccv->add_option("--m", m_m, "samples per replication");
    mccv->add_option("--reps", m_reps, "replications");
    mccv->add_option("--basis", m_basis)->check(CLI::IsMember({"gaussian", "lognormal"}));
    mccv->add_flag("--crude", m_crude, "report the crude estimator only");
    mccv->add_flag("--force-lambda-zero", m_lambda_zero, "disable the control (lambda = 0)");
    mccv->add_flag("--pilot", m_pilot, "estimate lambda on a separate pilot of size M/10");
    mccv->add_option("--strike", m_strike);
    mccv->add_option("--rate", m_rate);
    mccv->add_option("--rho", m_rho);
    mccv->add_option("--maturity", m_t);
    mccv->add_option("--spot", m_spot);
    mccv->add_option("--ref", m_ref, "reference value for the MSE");

    // local-behavior
    auto* local = app.add_subcommand("local-behavior", "per-cell weights and distortion in a window");
    std::string l_dist = "normal:0,1", l_window = "-1,1";
    int l_n = 1000;
    local->add_option("--dist", l_dist);
    local->add_option("--n", l_n)->required();
    local->add_option("--window", l_window, "lo,hi");

    CLI11_PARSE(app, argc, argv);

    qcub::GridStore store = make_store(g);

    if (*quantize) {
        store.config().tol_factor = q_tol;
        const auto& grid = store.get(qcub::Distribution::parse(q_dist), q_n);
        emit(g, g.format == "json" ? grid_json(grid) : grid_csv(grid));
        return 0;
    }

    if (*inspect) {
        const qcub::QuantizerGrid grid = qcub::read_grid_csv(i_file);
        double wsum = 0.0;
        for (double w : grid.weights) wsum += w;
        if (g.format == "json") {
            ordered_json j;
            j["dist"] = grid.dist.to_string();
            j["n"] = grid.level();
            j["distortion"] = grid.distortion;
            j["weight_sum"] = wsum;
            j["stationarity_residual"] = qcub::stationarity_residual(grid);
            j["cell_identity_residual"] = qcub::cell_identity_residual(grid);
            emit(g, j.dump() + "\n");
        } else {
            std::string out = "dist,n,distortion,weight_sum,stationarity_residual,cell_identity_residual\n";
            char buf[256];
            std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%.6g,%.6g\n",
                          grid.dist.to_string().c_str(), grid.level(), grid.distortion, wsum,
                          qcub::stationarity_residual(grid), qcub::cell_identity_residual(grid));
            emit(g, out + buf);
        }
        return 0;
    }

    if (*cub || *rr) {
        const bool is_rr = static_cast<bool>(*rr);
        const auto dist = qcub::Distribution::parse(is_rr ? r_dist : c_dist);
        const auto f = parse_function(is_rr ? r_f : c_f);
        const double est = is_rr
                               ? qcub::richardson_romberg(store, dist, f, r_n, r_ratio)
                               : qcub::quantized_expectation(store.get(dist, c_n), f);
        const auto ref = is_rr ? r_ref : c_ref;
        if (g.format == "json") {
            ordered_json j;
            j["estimate"] = est;
            if (ref) j["error"] = std::fabs(*ref - est);
            emit(g, j.dump() + "\n");
        } else {
            std::string out = ref ? "estimate,error\n" : "estimate\n";
            out += fmt("%.17g", est);
            if (ref) out += "," + fmt("%.8g", std::fabs(*ref - est));
            emit(g, out + "\n");
        }
        return 0;
    }

    if (*price) {
        qcub::Distribution law = qcub::Distribution::normal(0.0, 1.0);
        qcub::Fn1D f;
        double reference = 0.0;
        std::string provenance;
        if (p_exp == "call") {
            qcub::CallExperiment e;
            reference = e.reference();
            provenance = "closed form";
            if (p_basis == "gaussian") {
                f = [e](double z) { return e.gaussian_integrand(z); };
            } else {
                law = e.lognormal_law();
                f = [e](double x) { return e.lognormal_integrand(x); };
            }
        } else if (p_exp == "put-on-call") {
            qcub::PutOnCallExperiment e;
            reference = qcub::PutOnCallExperiment::kReference;
            provenance = "benchmark constant";
            if (p_basis == "gaussian") {
                f = [e](double z) { return e.gaussian_integrand(z); };
            } else {
                law = e.lognormal_law();
                f = [e](double x) { return e.lognormal_integrand(x); };
            }
        } else {
            qcub::ExchangeSpreadExperiment e;
            reference = qcub::ExchangeSpreadExperiment::kReference;
            provenance = "benchmark constant";
            f = [e](double z) { return e.integrand(z); };
        }

        if (!p_levels.empty()) {
            std::vector<int> levels = parse_levels(p_levels);
            qcub::RateStudy study;
            if (p_rr) {
                study.levels = levels;
                study.k = p_k;
                study.reference = reference;
                study.provenance = provenance;
                for (int n : levels) {
                    const double est = qcub::richardson_romberg(store, law, f, n, p_ratio);
                    study.estimates.push_back(est);
                    study.errors.push_back(std::fabs(reference - est));
                    study.scaled.push_back(std::pow(n, p_k) * study.errors.back());
                }
                std::vector<double> lv(levels.begin(), levels.end());
                study.fitted_slope = qcub::fit_rate(lv, study.errors);
            } else {
                study = qcub::rate_study(store, law, f, reference, provenance, levels, p_k);
            }
            if (g.out.empty()) {
                emit(g, qcub::rate_csv_string(study) + qcub::rate_json_string(study) + "\n");
            } else {
                qcub::write_rate_csv(study, g.out);
                qcub::write_rate_json(study, g.out + ".json");
            }
            return 0;
        }

        const double est = p_rr ? qcub::richardson_romberg(store, law, f, p_n, p_ratio)
                                : qcub::quantized_expectation(store.get(law, p_n), f);
        if (g.format == "json") {
            ordered_json j;
            j["experiment"] = p_exp;
            j["basis"] = p_basis;
            j["n"] = p_n;
            j["estimate"] = est;
            j["reference"] = reference;
            j["error"] = std::fabs(reference - est);
            emit(g, j.dump() + "\n");
        } else {
            char buf[256];
            std::snprintf(buf, sizeof buf, "experiment,basis,n,estimate,reference,error\n%s,%s,%d,%.8f,%.8f,%.3e\n",
                          p_exp.c_str(), p_basis.c_str(), p_n, est, reference,
                          std::fabs(reference - est));
            emit(g, buf);
        }
        return 0;
    }

    if (*mccv) {
        qcub::BasketExperiment e;
        e.d = m_d;
        e.strike = m_strike;
        e.r = m_rate;
        e.rho = m_rho;
        e.t = m_t;
        e.s0 = m_spot;
        const qcub::BSModel model = e.model();

        qcub::CVSpec spec;
        spec.basis = m_basis == "gaussian" ? qcub::CvBasis::gaussian : qcub::CvBasis::lognormal;
        spec.grid_level = m_nq;
        spec.pilot_lambda = m_pilot;
        if (m_lambda_zero) spec.lambda_override = std::vector<double>(m_d, 0.0);

        double reference;
        if (m_ref) reference = *m_ref;
        else reference = e.reference(store);

        const qcub::ExperimentResult res = qcub::run_experiment(
            store, model, e.alphas(), e.strike, spec, m_m, m_reps, g.seed, reference);

        if (g.format == "json") {
            ordered_json j;
            j["reference"] = reference;
            j["crude"] = report_json(res.crude);
            if (!m_crude) {
                j["controlled"] = report_json(res.controlled);
                j["lambda"] = res.lambda;
                j["quantized_means"] = res.quantized_means;
            }
            if (!res.warning.empty()) j["warning"] = res.warning;
            emit(g, j.dump() + "\n");
        } else {
            std::string out = "estimator,mean,half_width_95,mse\n";
            out += report_csv(res.crude);
            if (!m_crude) out += report_csv(res.controlled);
            emit(g, out);
        }
        return 0;
    }

    if (*local) {
        const auto dist = qcub::Distribution::parse(l_dist);
        const auto comma = l_window.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("--window expects 'lo,hi'");
        const double lo = std::stod(l_window.substr(0, comma));
        const double hi = std::stod(l_window.substr(comma + 1));
        const auto rows = qcub::local_behavior_table(store.get(dist, l_n), lo, hi);
        if (g.format == "json") {
            ordered_json j = ordered_json::array();
            for (const auto& row : rows) {
                ordered_json o;
                o["x"] = row.point;
                o["n_weight"] = row.scaled_weight;
                o["n3_local_distortion"] = row.scaled_distortion;
                j.push_back(o);
            }
            emit(g, j.dump() + "\n");
        } else {
            std::string out = "x,n_weight,n3_local_distortion\n";
            char buf[128];
            for (const auto& row : rows) {
                std::snprintf(buf, sizeof buf, "%.8g,%.8g,%.8g\n", row.point,
                              row.scaled_weight, row.scaled_distortion);
                out += buf;
            }
            emit(g, out);
        }
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 1;
    }
}
