// Command-line front end: load or synthesize an instance, run one solver,
// print a one-line summary, optionally write a trace CSV / SVG plot / LP dump.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "invloc/invloc.hpp"

namespace {

int run(int argc, char** argv) {
    CLI::App app{"Inverse minisum single-facility location solver"};

    std::string instance_path, points_path;
    std::uint64_t seed = 1;
    double param_lo = 1.0, param_hi = 10.0;
    std::string norm_str = "sq";
    std::string algo = "isflp1";
    std::vector<double> target_xy;
    double eps = 1e-4;
    std::string stop_str = "dist";
    std::size_t max_iter = 500;
    std::string trace_path, plot_path, lp_dump_path;

    auto* inst_opt = app.add_option("--instance", instance_path, "Instance CSV (7 fields/site)");
    auto* pts_opt = app.add_option("--points", points_path, "Two-column coordinate file");
    app.add_option("--seed", seed, "Seed for --points weight/cost generation");
    app.add_option("--param-lo", param_lo, "Lower bound for generated weights/costs");
    app.add_option("--param-hi", param_hi, "Upper bound for generated weights/costs");
    app.add_option("--norm", norm_str, "Norm: sq | l2 | l1");
    app.add_option("--algo", algo, "Algorithm: isflp1 | isflp2 | baseline | forward");
    app.add_option("--target", target_xy, "Target point x y")->expected(2);
    app.add_option("--eps", eps, "Stop-rule epsilon");
    app.add_option("--stop", stop_str, "Stop rule: gap | dist | fixpoint");
    app.add_option("--max-iter", max_iter, "Iteration cap");
    app.add_option("--trace", trace_path, "Write iteration trace CSV here");
    app.add_option("--plot", plot_path, "Write SVG plot here");
    app.add_option("--lp-dump", lp_dump_path, "Append every solved LP to this file");
    inst_opt->excludes(pts_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    invloc::NormTag norm;
    try {
        norm = invloc::parse_norm_tag(norm_str);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }

    std::optional<invloc::Instance> instance;
    try {
        if (!instance_path.empty()) {
            std::ifstream in(instance_path);
            if (!in) {
                std::cerr << "cannot open " << instance_path << '\n';
                return 1;
            }
            invloc::Instance parsed = invloc::parse_instance(in);
            instance.emplace(parsed.sites(), parsed.costs(), norm);
        } else if (!points_path.empty()) {
            std::ifstream in(points_path);
            if (!in) {
                std::cerr << "cannot open " << points_path << '\n';
                return 1;
            }
            const auto points = invloc::load_xy_points(in);
            instance.emplace(invloc::attach_random_params(points, seed, param_lo, param_hi, norm));
        } else {
            std::cerr << "one of --instance or --points is required\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }

    if (algo != "forward" && target_xy.size() != 2) {
        std::cerr << "--target <x> <y> is required\n";
        return 1;
    }
    if (algo == "baseline" && norm != invloc::NormTag::SquaredEuclidean) {
        std::cerr << "baseline requires squared-Euclidean norm\n";
        return 1;
    }

    invloc::StopKind stop_kind;
    if (stop_str == "gap") stop_kind = invloc::StopKind::RelativeGap;
    else if (stop_str == "dist") stop_kind = invloc::StopKind::TargetDistance;
    else if (stop_str == "fixpoint") stop_kind = invloc::StopKind::CoordinateFixpoint;
    else {
        std::cerr << "unknown stop rule '" << stop_str << "'\n";
        return 1;
    }

    std::ofstream lp_dump;
    if (!lp_dump_path.empty()) {
        lp_dump.open(lp_dump_path);
        if (!lp_dump) {
            std::cerr << "cannot open " << lp_dump_path << '\n';
            return 1;
        }
        invloc::lp_dump_sink = &lp_dump;
    }

    try {
        if (algo == "forward") {
            const auto med = invloc::solve_median(*instance);
            std::cout << "median=(" << med.location.x << ',' << med.location.y
                      << ") value=" << med.value << " iterations=" << med.iterations << '\n';
            return 0;
        }

        const invloc::Point target(target_xy[0], target_xy[1]);
        const invloc::StopRule stop(stop_kind, eps);
        invloc::SolveReport report;
        if (algo == "isflp1") report = invloc::isflp1(*instance, target, stop, max_iter, seed);
        else if (algo == "isflp2") report = invloc::isflp2(*instance, target, stop, max_iter, seed);
        else if (algo == "baseline") report = invloc::baseline_sqeuclid(*instance, target);
        else {
            std::cerr << "unknown algorithm '" << algo << "'\n";
            return 1;
        }

        if (!trace_path.empty()) {
            std::ofstream out(trace_path);
            if (!out) {
                std::cerr << "cannot open " << trace_path << '\n';
                return 1;
            }
            invloc::emit_trace_csv(report, out);
        }
        if (!plot_path.empty()) {
            std::ofstream out(plot_path);
            if (!out) {
                std::cerr << "cannot open " << plot_path << '\n';
                return 1;
            }
            invloc::emit_svg(*instance, report, target, out);
        }

        std::cout << "cost=" << report.accumulated_cost << " net_cost=" << report.net_cost
                  << " iterations=" << (report.iterations.size() - 1)
                  << " stop=" << invloc::stop_reason_name(report.stop_reason)
                  << " elapsed_s=" << report.elapsed_seconds << '\n';
        return report.stop_reason == invloc::StopReason::SubproblemFailed ? 2 : 0;
    } catch (const invloc::SolverFailureError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const invloc::SubproblemInfeasibleError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const invloc::SubproblemFailureError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
