#pragma once

#include <optional>
#include <span>

#include "varsel/model_spec.hpp"

namespace varsel {

// Selection quality of one replicate against the true support. The
// intercept is outside both bit-sets and never counted. An empty selection
// has fdr = 0 by convention (the 0/0 case); pervasive null selection is
// handled by the aggregate NA rule instead.
struct ReplicateMetrics {
    bool correct = false; // selected == truth exactly
    double recall = 0.0;  // |selected & truth| / |truth|
    double fdr = 0.0;     // |selected \ truth| / |selected|
    bool is_null = false; // selected == empty set
    int n_selected = 0;
    int n_false = 0;
};

ReplicateMetrics replicate_metrics(const ModelSpec& selected, const ModelSpec& truth);

// Aggregate over replicates of one (method, cell) pair. fdr is the mean of
// per-replicate FDR, set to NA when the null model was selected in more
// than half the replicates. fdr_pooled divides total false discoveries by
// total selections (NA when nothing was ever selected).
struct MetricsSummary {
    double cir = 0.0;
    double recall = 0.0;
    std::optional<double> fdr;
    std::optional<double> fdr_pooled;
    int n_replicates = 0;
    int n_null_selected = 0;
};

MetricsSummary aggregate(std::span<const ReplicateMetrics> replicates);

} // namespace varsel
