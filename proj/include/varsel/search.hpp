#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "varsel/criteria.hpp"
#include "varsel/model.hpp"

namespace varsel {

// Outcome of a model-space search. `trace` is filled only when requested:
// exhaustive records every scored model, stepwise the accepted path
// (starting spec first), and the GA its incumbent after each generation.
struct SearchResult {
    FittedModel best;
    double best_score = 0.0;
    std::size_t n_models_evaluated = 0;
    std::size_t n_skipped = 0; // rank-deficient / degenerate candidates
    std::vector<std::pair<ModelSpec, double>> trace;
};

struct SearchOptions {
    bool keep_trace = false;
};

// Fits candidate specs for one dataset and scores them under one criterion.
// Gaussian subset fits go through a shared QR factor of the full design.
// Stateless after construction; safe for concurrent score() calls.
class ModelScorer {
  public:
    ModelScorer(const Dataset& data, Criterion criterion);

    FittedModel fit(const ModelSpec& spec) const;
    // Criterion value, or +infinity when the fit fails.
    double score(const ModelSpec& spec) const;
    double score(const FittedModel& fit) const;

    const Dataset& data() const { return *data_; }
    Criterion criterion() const { return criterion_; }

  private:
    const Dataset* data_;
    Criterion criterion_;
    std::optional<LmPrecomp> precomp_;
};

// Complete enumeration of all 2^p models; the criterion minimizer under the
// tie rule (fewer regressors, then lexicographically smaller index set).
// Guarded at p <= 25; rank-deficient specs are skipped and counted.
SearchResult exhaustive_search(const Dataset& data, Criterion criterion,
                               const SearchOptions& options = {});

enum class StepwiseDirection { Both, Forward, Backward };

// Greedy neighborhood descent: at each iteration every single-variable
// addition and deletion of the current spec is scored and the best neighbor
// is taken if it strictly improves the criterion. Deterministic given data;
// may stop at a local optimum.
SearchResult stepwise_search(const Dataset& data, Criterion criterion,
                             const ModelSpec& start,
                             StepwiseDirection direction = StepwiseDirection::Both,
                             const SearchOptions& options = {});
SearchResult stepwise_search(const Dataset& data, Criterion criterion,
                             const SearchOptions& options = {});

struct GAConfig {
    int population_size = 100;
    int max_generations = 200;
    int stall_generations = 20;
    double crossover_prob = 0.8;
    double mutation_prob_per_gene = -1.0; // <0 means 1/p
    double elite_fraction = 0.05;
    std::uint64_t seed = 0;
    // Chromosomes injected into generation zero (the rest are fair coin
    // flips per gene). Lets callers resume from known-good models.
    std::vector<ModelSpec> initial_population;

    void validate(int p) const;
};

// Binary-chromosome genetic algorithm over the 2^p space: rank-based parent
// selection, uniform crossover, per-gene bit-flip mutation, elitism. Stops
// at max_generations or after stall_generations without improvement of the
// incumbent; returns the best model ever visited. Reproducible given seed.
// Failed fits receive +infinity score. Scores are cached per chromosome so
// repeated chromosomes are not refit; n_models_evaluated counts distinct fits.
SearchResult ga_search(const Dataset& data, Criterion criterion, const GAConfig& config,
                       const SearchOptions& options = {});

} // namespace varsel
