#include <filesystem>
#include <fstream>
#include <sstream>

#include "boundlab/cli.hpp"
#include "doctest.h"

using namespace boundlab::cli;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("boundlab_cli_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

int call(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int rc = dispatch(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return rc;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("defaults resolve and round-trip") {
    for (const std::string& sub : subcommands()) {
        const std::vector<std::string> args{sub};
        const CliInvocation inv = parse_invocation(args);
        CHECK(inv.subcommand == sub);
        CHECK(inv.flags.count("out") == 1);
        CHECK(parse_echo(echo_text(inv)) == inv);
        const std::vector<std::string> again = to_args(inv);
        CHECK(parse_invocation(again) == inv);
    }
}

TEST_CASE("explicit flags round-trip") {
    const std::vector<std::string> args{"counterexample", "--K",     "10000", "--trials", "1000", "--delta",
                                        "1",              "--alpha", "0.001", "--beta1",  "0.9",  "--beta2",
                                        "0.999",          "--seed",  "7",     "--out",    "runs/", "--bias-correction"};
    const CliInvocation inv = parse_invocation(args);
    CHECK(inv.flags.at("K") == "10000");
    CHECK(inv.flags.at("seed") == "7");
    CHECK(inv.flags.at("bias-correction") == "true");
    CHECK(inv.flags.at("C") == "auto");
    CHECK(inv.out_dir == std::filesystem::path("runs/"));
    CHECK(parse_echo(echo_text(inv)) == inv);
    CHECK(parse_invocation(to_args(inv)) == inv);

    const std::vector<std::string> cal{"contradiction", "--C", "4", "--calibrate"};
    CHECK(parse_invocation(cal).flags.at("C") == "auto");
    const std::vector<std::string> alias{"validate-bounds", "--horizon", "77"};
    CHECK(parse_invocation(alias).flags.at("T") == "77");
}

TEST_CASE("echo parsing rejects malformed text") {
    CHECK_THROWS_AS(parse_echo("subcommand=regret\n"), UsageError);
    CHECK_THROWS_AS(parse_echo("nonsense\n"), UsageError);
    CHECK_THROWS_AS(parse_echo("subcommand=fly\n"), UsageError);
}

TEST_CASE("usage errors exit 2") {
    std::string err;
    CHECK(call({}, nullptr, &err) == kExitUsage);
    CHECK(call({"fly"}) == kExitUsage);
    CHECK(call({"regret", "--no-such-flag", "1"}) == kExitUsage);
    CHECK(call({"regret", "--T"}) == kExitUsage);
    const auto dir = scratch_dir("usage");
    CHECK(call({"regret", "--T", "abc", "--out", dir.string()}, nullptr, &err) == kExitUsage);
    CHECK(err.find("--T") != std::string::npos);
    CHECK(call({"regret", "--beta1-schedule", "sometimes", "--out", dir.string()}) == kExitUsage);
    CHECK(call({"equivalence", "--a", "sgdm:warp", "--out", dir.string()}) == kExitUsage);
    CHECK(call({"validate-bounds", "--family", "gamma", "--gamma", "-1", "--out", dir.string()}) == kExitUsage);
    std::filesystem::remove_all(dir);
}

TEST_CASE("help exits 0") {
    std::string out;
    CHECK(call({"--help"}, &out) == kExitOk);
    CHECK(out.find("counterexample") != std::string::npos);
    CHECK(call({"regret", "--help"}) == kExitOk);
}

TEST_CASE("validate-bounds") {
    const auto dir = scratch_dir("vb");
    std::string out;
    CHECK(call({"validate-bounds", "--family", "gamma", "--gamma", "1", "--horizon", "1000000", "--out", dir.string()},
               &out) == kExitOk);
    CHECK(out.find("drift_M=2.99999") != std::string::npos);
    CHECK(out.find("prop1_bound=5") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "config.echo"));
    const CliInvocation echoed = parse_echo(slurp(dir / "config.echo"));
    CHECK(echoed.flags.at("T") == "1000000");
    CHECK(call({"validate-bounds", "--family", "step", "--K", "100", "--T", "200", "--out", dir.string()}) == kExitOk);
    // A scan that stops before K leaves the step bounds apart.
    CHECK(call({"validate-bounds", "--family", "step", "--K", "100", "--T", "50", "--out", dir.string()}) ==
          kExitCertificateFailed);
    std::filesystem::remove_all(dir);
}

TEST_CASE("equivalence subcommand") {
    const auto dir = scratch_dir("eq");
    std::string out;
    CHECK(call({"equivalence", "--a", "adabound:constant:0.1", "--b", "sgdm:kappa=beta1", "--T", "10000", "--seed",
                "1", "--out", dir.string()},
               &out) == kExitOk);
    CHECK(std::filesystem::exists(dir / "equivalence.csv"));
    CHECK(call({"equivalence", "--a", "adabound:step", "--b", "adam", "--T", "2000", "--out", dir.string()}) ==
          kExitOk);
    CHECK(call({"equivalence", "--a", "adabound:claim1", "--b", "adam", "--T", "2000", "--C", "64", "--out",
                dir.string()}) == kExitOk);
    CHECK(call({"equivalence", "--a", "adabound:constant:0.1", "--b", "sgdm", "--T", "100", "--out", dir.string()}) ==
          kExitCertificateFailed);
    std::filesystem::remove_all(dir);
}

TEST_CASE("regret and counterexample subcommands") {
    const auto dir = scratch_dir("runs");
    CHECK(call({"regret", "--T", "1000", "--trials", "3", "--out", dir.string()}) == kExitOk);
    CHECK(slurp(dir / "regret.csv").rfind("t,regret_mean,thm3_rhs,cor2_rhs,thm1_rhs\n", 0) == 0);
    CHECK(call({"regret", "--problem", "linear", "--beta1-schedule", "over-t", "--T", "500", "--trials", "2", "--out",
                dir.string()}) == kExitOk);
    CHECK(call({"counterexample", "--K", "1024", "--trials", "50", "--C", "256", "--alpha", "0.01", "--beta2", "0.99",
                "--out", dir.string()}) == kExitOk);
    const std::string csv = slurp(dir / "counterexample.csv");
    CHECK(csv.rfind("t,mean_x,ci95_x,mean_subopt,ci95_subopt,trials\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 11);
    std::filesystem::remove_all(dir);
}

TEST_CASE("contradiction subcommand refuses an oversized run") {
    const auto dir = scratch_dir("contra");
    std::string out;
    CHECK(call({"contradiction", "--C", "2", "--max-steps", "1000", "--out", dir.string()}, &out) ==
          kExitCertificateFailed);
    CHECK(out.find("not executed") != std::string::npos);
    CHECK(slurp(dir / "contradiction.csv").find("23039200,") != std::string::npos);
    std::filesystem::remove_all(dir);
}
