#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "boundlab/harness.hpp"

namespace boundlab {

namespace {

class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, std::string_view header) : path_(path) {
        if (path.has_parent_path()) {
            std::error_code ec;
            std::filesystem::create_directories(path.parent_path(), ec);
        }
        out_.open(path, std::ios::binary | std::ios::trunc);
        if (!out_) fail("cannot open for writing");
        out_ << header << '\n';
    }

    template <class... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cells, first = false), ...);
        out_ << '\n';
    }

    void close() {
        out_.close();
        if (!out_) fail("write failed");
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error(path_.string() + ": " + what);
    }

    std::filesystem::path path_;
    std::ofstream out_;
};

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

void write_counterexample_csv(const MonteCarloReport& report, const std::filesystem::path& path) {
    CsvFile csv(path, "t,mean_x,ci95_x,mean_subopt,ci95_subopt,trials");
    for (const CheckpointSummary& r : report.rows) {
        csv.row(r.t, format_number(r.mean_x), format_number(r.ci95_x), format_number(r.mean_subopt),
                format_number(r.ci95_subopt), r.trials);
    }
    csv.close();
}

void write_regret_csv(const MonteCarloReport& report, const std::filesystem::path& path) {
    CsvFile csv(path, "t,regret_mean,thm3_rhs,cor2_rhs,thm1_rhs");
    for (const CheckpointSummary& r : report.rows) {
        csv.row(r.t, format_number(r.mean_regret), format_number(r.mean_bounds.thm3), format_number(r.mean_bounds.cor2),
                format_number(r.mean_bounds.thm1));
    }
    csv.close();
}

void write_equivalence_csv(const EquivalenceReport& report, const std::filesystem::path& path) {
    CsvFile csv(path, "t,max_abs_diff");
    for (const EquivalenceRow& r : report.rows) csv.row(r.t, format_number(r.max_abs_diff));
    csv.close();
}

void write_contradiction_csv(const ContradictionReport& report, const std::filesystem::path& path) {
    CsvFile csv(path, "K,rhs_over_K,mc_avg_regret_per_step,ci95,trials,C,gamma_or_step");
    if (report.K > 0) {
        csv.row(report.K, format_number(report.rhs_over_K), format_number(report.mc_avg_regret_per_step),
                format_number(report.ci95), report.trials, format_number(report.C), report.bound_family);
    }
    csv.close();
}

}  // namespace boundlab
