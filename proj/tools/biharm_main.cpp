// Command-line driver for the certification toolkit.
//
// Commands: constants, certify-subsolution, certify-stability, hr-sample,
// table1, branch, eigen, bound-check, report.
// Exit codes for certifying commands: 0 certified, 1 refuted, 2 inconclusive.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "biharm/branch.hpp"
#include "biharm/params.hpp"
#include "biharm/report.hpp"
#include "biharm/stability.hpp"
#include "biharm/subsolution.hpp"

namespace {

using biharm::json;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot open output file " + out_path);
    os << text;
    if (text.empty() || text.back() != '\n') os << '\n';
}

int verdict_exit(biharm::Verdict v) {
    switch (v) {
        case biharm::Verdict::certified: return 0;
        case biharm::Verdict::refuted: return 1;
        default: return 2;
    }
}

biharm::PrecisionRequest parse_precision(const std::string& s) {
    if (s == "double") return biharm::PrecisionRequest::plain_double;
    if (s == "extended") return biharm::PrecisionRequest::extended;
    return biharm::PrecisionRequest::automatic;
}

json run_config(const std::string& command, const json& args) {
    json j;
    j["command"] = command;
    j["args"] = args;
    return j;
}

std::string audit_csv(const std::vector<biharm::AuditRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "n,m,p,lambda_mult,beta_mult,sub_verdict,sub_margin,sub_witness_r,"
          "stab_verdict,stab_margin,stab_witness_r,bundle_valid,precision\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.m << ',' << r.p << ',' << r.lambda_mult << ',' << r.beta_mult << ','
           << to_string(r.sub.verdict) << ',' << r.sub.worst_margin << ',' << r.sub.worst_location
           << ',' << to_string(r.stab.verdict) << ',' << r.stab.worst_margin << ','
           << r.stab.worst_location << ',' << (r.lemma34_bundle_valid ? 1 : 0) << ','
           << r.sub.precision << '\n';
    }
    return os.str();
}

std::string branch_csv(const biharm::BranchResult& res) {
    std::ostringstream os;
    os.precision(17);
    os << "lambda,u0,mu1,converged\n";
    for (const auto& pt : res.points)
        os << pt.lambda << ',' << pt.center_value << ',' << pt.mu1 << ',' << (pt.converged ? 1 : 0)
           << '\n';
    return os.str();
}

int rows_exit_code(const std::vector<biharm::AuditRow>& rows) {
    bool refuted = false, inconclusive = false;
    for (const auto& r : rows) {
        for (const auto* c : {&r.sub, &r.stab}) {
            if (c->verdict == biharm::Verdict::refuted) refuted = true;
            if (c->verdict == biharm::Verdict::inconclusive) inconclusive = true;
        }
    }
    if (refuted) return 1;
    if (inconclusive) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certification and continuation toolkit for the supercritical "
                 "clamped biharmonic eigenvalue problem"};
    app.require_subcommand(1);

    int n = 13;
    double p = 30.0, m = 3.5;
    double lambda_mult = 1.0, beta_mult = 1.0;
    std::string weight = "improved";
    int nodes = 200;
    std::string precision = "auto";
    std::uint64_t seed = 42;
    std::size_t trials = 200;
    std::string out_path, format = "json";
    bool with_branch = false;
    std::vector<double> p_grid;

    auto add_common = [&](CLI::App* cmd, bool needs_p = true, bool needs_m = true) {
        cmd->add_option("--n", n, "space dimension (>= 5)");
        if (needs_p) cmd->add_option("--p", p, "nonlinearity exponent");
        if (needs_m) cmd->add_option("--m", m, "auxiliary profile exponent");
        cmd->add_option("--out", out_path, "output file (default stdout)");
        cmd->add_option("--precision", precision, "double|extended|auto");
    };

    auto* c_const = app.add_subcommand("constants", "derived constants as flat JSON");
    add_common(c_const);

    auto* c_sub = app.add_subcommand("certify-subsolution",
                                     "certify D^2 omega_m <= lambda' (1+omega_m)^p");
    add_common(c_sub);
    c_sub->add_option("--lambda-mult", lambda_mult, "lambda' as a multiple of K0")->required();

    auto* c_stab = app.add_subcommand("certify-stability",
                                      "certify p beta (1+omega_m)^{p-1} <= W(r)");
    add_common(c_stab);
    c_stab->add_option("--beta-mult", beta_mult, "beta as a multiple of K0")->required();
    c_stab->add_option("--weight", weight, "classical|improved");

    auto* c_hr = app.add_subcommand("hr-sample", "sample the Hardy-Rellich inequality");
    add_common(c_hr, false, false);
    c_hr->add_option("--weight", weight, "classical|improved");
    c_hr->add_option("--trials", trials, "number of random test functions");
    c_hr->add_option("--seed", seed, "master seed");

    auto* c_table = app.add_subcommand("table1", "audit the paper's multiplier table");
    add_common(c_table, false);
    c_table->add_option("--p-grid", p_grid, "override the per-row p grid");
    c_table->add_option("--weight", weight, "classical|improved");
    c_table->add_option("--format", format, "json|csv");

    std::string solution_out;
    auto* c_branch = app.add_subcommand("branch", "minimal-branch continuation");
    add_common(c_branch, true, false);
    c_branch->add_option("--nodes", nodes, "grid nodes");
    std::string branch_format = "csv";
    c_branch->add_option("--format", branch_format, "csv|json (default csv: lambda,u0,mu1,converged)");
    c_branch->add_option("--solution-out", solution_out,
                         "also write the last branch solution as r,value CSV");

    auto* c_eigen = app.add_subcommand("eigen", "first clamped eigenvalue");
    add_common(c_eigen, false, false);
    c_eigen->add_option("--nodes", nodes, "grid nodes");

    auto* c_bound = app.add_subcommand("bound-check",
                                       "check u_lambda <= r^{-4/(p-1)} - 1 along the branch");
    add_common(c_bound, true, false);
    c_bound->add_option("--nodes", nodes, "grid nodes");

    auto* c_report = app.add_subcommand("report", "combined singularity verdict bundle");
    add_common(c_report);
    c_report->add_option("--lambda-mult", lambda_mult)->required();
    c_report->add_option("--beta-mult", beta_mult)->required();
    c_report->add_option("--weight", weight, "classical|improved");
    c_report->add_flag("--with-branch", with_branch, "also run the continuation cross-check");
    c_report->add_option("--nodes", nodes, "grid nodes for the cross-check");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto wkind = (weight == "classical") ? biharm::WeightFunction::Kind::classical
                                                   : biharm::WeightFunction::Kind::improved;
        const auto prec = parse_precision(precision);

        if (c_const->parsed()) {
            const biharm::ProblemParams params(n, p, m);
            json j = (prec == biharm::PrecisionRequest::extended)
                         ? biharm::constants_json<long double>(params)
                         : biharm::constants_json<double>(params);
            emit(j.dump(2), out_path);
            return 0;
        }
        if (c_sub->parsed()) {
            const biharm::ProblemParams params(n, p, m);
            const auto rep = biharm::certify_subsolution(params, lambda_mult, prec);
            json j = biharm::to_json(rep);
            j["config"] = run_config("certify-subsolution",
                                     {{"n", n}, {"p", p}, {"m", m}, {"lambda_mult", lambda_mult},
                                      {"precision", precision}})["args"];
            emit(j.dump(2), out_path);
            return verdict_exit(rep.verdict);
        }
        if (c_stab->parsed()) {
            const biharm::ProblemParams params(n, p, m);
            const auto rep = biharm::certify_stability(params, beta_mult, wkind, prec);
            json j = biharm::to_json(rep);
            j["config"] = run_config("certify-stability",
                                     {{"n", n}, {"p", p}, {"m", m}, {"beta_mult", beta_mult},
                                      {"weight", weight}, {"precision", precision}})["args"];
            emit(j.dump(2), out_path);
            return verdict_exit(rep.verdict);
        }
        if (c_hr->parsed()) {
            const biharm::WeightFunction w{wkind, n};
            const auto rep = biharm::sample_hardy_rellich(w, trials, seed);
            json j = biharm::to_json(rep);
            j["config"] = run_config("hr-sample", {{"n", n}, {"weight", weight}, {"trials", trials},
                                                   {"seed", seed}})["args"];
            emit(j.dump(2), out_path);
            return rep.min_ratio >= 1.0 - 1e-6 ? 0 : 1;
        }
        if (c_table->parsed()) {
            const auto rows = biharm::audit_table1(p_grid, m, wkind);
            if (format == "csv") {
                emit(audit_csv(rows), out_path);
            } else {
                json j;
                j["config"] = run_config("table1", {{"m", m}, {"weight", weight},
                                                    {"p_grid", p_grid}})["args"];
                j["rows"] = json::array();
                for (const auto& r : rows) j["rows"].push_back(biharm::to_json(r));
                emit(j.dump(2), out_path);
            }
            return rows_exit_code(rows);
        }
        if (c_branch->parsed()) {
            const biharm::ProblemParams params(n, p, m);
            const auto grid = biharm::RadialGrid::make(nodes, n);
            const auto res = biharm::continue_branch(params, grid);
            if (!solution_out.empty() && !res.points.empty())
                biharm::write_csv(res.points.back().solution, solution_out);
            if (branch_format == "json") {
                json j;
                j["config"] = run_config("branch", {{"n", n}, {"p", p}, {"nodes", nodes}})["args"];
                j["lambda_star_estimate"] = res.lambda_star_estimate;
                j["fold_detected"] = res.fold_detected;
                j["mu1_monotone"] = res.mu1_monotone;
                j["lambda1"] = res.lambda1;
                j["points"] = res.points.size();
                j["weak_singularity_estimate"] = res.weak_singularity_estimate;
                j["precision"] = "double";
                emit(j.dump(2), out_path);
            } else {
                emit(branch_csv(res), out_path);
            }
            return 0;
        }
        if (c_eigen->parsed()) {
            const auto grid = biharm::RadialGrid::make(nodes, n);
            const auto l1 = biharm::lambda1(n, grid);
            json j;
            j["lambda1"] = l1.value;
            j["one_signed_eigenfunction"] = l1.one_signed;
            j["nodes"] = nodes;
            j["n"] = n;
            j["precision"] = "double";
            emit(j.dump(2), out_path);
            return 0;
        }
        if (c_bound->parsed()) {
            const biharm::ProblemParams params(n, p, m);
            const auto grid = biharm::RadialGrid::make(nodes, n);
            const auto res = biharm::continue_branch(params, grid);
            const auto rep = biharm::check_upper_bound(res, params);
            json j;
            j["config"] = run_config("bound-check", {{"n", n}, {"p", p}, {"nodes", nodes}})["args"];
            j["max_violation"] = rep.max_violation;
            j["location_r"] = rep.location;
            j["lambda_at_worst"] = rep.lambda_at_worst;
            j["satisfied"] = rep.satisfied;
            j["branch_points"] = res.points.size();
            j["lambda_star_estimate"] = res.lambda_star_estimate;
            j["precision"] = "double";
            emit(j.dump(2), out_path);
            return rep.satisfied ? 0 : 1;
        }
        if (c_report->parsed()) {
            std::optional<biharm::BranchResult> branch;
            if (with_branch) {
                const auto grid = biharm::RadialGrid::make(nodes, n);
                branch = biharm::continue_branch(biharm::ProblemParams(n, p, m), grid);
            }
            const auto rep = biharm::singularity_report(n, p, m, lambda_mult, beta_mult, wkind,
                                                        branch ? &*branch : nullptr);
            json j = biharm::to_json(rep);
            j["config"] = run_config("report", {{"n", n}, {"p", p}, {"m", m},
                                                {"lambda_mult", lambda_mult},
                                                {"beta_mult", beta_mult}, {"weight", weight},
                                                {"with_branch", with_branch}})["args"];
            emit(j.dump(2), out_path);
            if (rep.branch_checked && !rep.branch_consistent) return 1;
            if (rep.row.sub.verdict == biharm::Verdict::inconclusive ||
                rep.row.stab.verdict == biharm::Verdict::inconclusive)
                return 2;
            return rep.valid ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
