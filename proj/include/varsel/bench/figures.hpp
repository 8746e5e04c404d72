#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace varsel::bench {

struct SummaryRow {
    std::string study;
    std::string family;
    int n = 0;
    double rho = 0.0;
    double sigma2 = 0.0;
    std::string method;
    int n_replicates = 0;
    double cir = 0.0;
    double recall = 0.0;
    std::optional<double> fdr;        // NA under the pervasive-null rule
    std::optional<double> fdr_pooled;
    int n_null_selected = 0;
};

std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& file);

struct RenderResult {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings; // absent grid points, one per line
};

// Renders one panel grid per metric (rows = sigma^2, columns = rho, x =
// log-scaled n, one line per method) as cir.svg / recall.svg / fdr.svg in
// the results directory, plus figures_data.csv with the plotted values in
// tidy form. NA cells become gaps in the lines; the FDR panels carry dashed
// reference lines at 0.05 and 0.10. Missing grid points are reported as
// warnings, not errors.
RenderResult render_figures(const std::filesystem::path& results_dir);

} // namespace varsel::bench
