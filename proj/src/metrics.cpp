#include "varsel/metrics.hpp"

#include "varsel/errors.hpp"

namespace varsel {

ReplicateMetrics replicate_metrics(const ModelSpec& selected, const ModelSpec& truth) {
    if (selected.width() != truth.width())
        throw DimensionError("selected and truth bit-set widths differ");
    const int n_truth = truth.count();
    if (n_truth == 0) throw TruthEmptyError("recall is undefined for an empty truth");

    int hits = 0, falses = 0;
    for (int j = 0; j < selected.width(); ++j) {
        if (!selected.test(j)) continue;
        if (truth.test(j))
            ++hits;
        else
            ++falses;
    }

    ReplicateMetrics m;
    m.n_selected = hits + falses;
    m.n_false = falses;
    m.correct = selected == truth;
    m.recall = static_cast<double>(hits) / n_truth;
    m.fdr = m.n_selected > 0 ? static_cast<double>(falses) / m.n_selected : 0.0;
    m.is_null = m.n_selected == 0;
    return m;
}

MetricsSummary aggregate(std::span<const ReplicateMetrics> replicates) {
    if (replicates.empty()) throw Error("aggregate needs at least one replicate");
    MetricsSummary s;
    s.n_replicates = static_cast<int>(replicates.size());
    double fdr_sum = 0.0;
    long pooled_false = 0, pooled_selected = 0;
    for (const ReplicateMetrics& m : replicates) {
        s.cir += m.correct ? 1.0 : 0.0;
        s.recall += m.recall;
        fdr_sum += m.fdr;
        if (m.is_null) ++s.n_null_selected;
        pooled_false += m.n_false;
        pooled_selected += m.n_selected;
    }
    s.cir /= s.n_replicates;
    s.recall /= s.n_replicates;
    if (2 * s.n_null_selected <= s.n_replicates) // NA when null selected > 50%
        s.fdr = fdr_sum / s.n_replicates;
    if (pooled_selected > 0)
        s.fdr_pooled = static_cast<double>(pooled_false) / pooled_selected;
    return s;
}

} // namespace varsel
