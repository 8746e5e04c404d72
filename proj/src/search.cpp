#include "varsel/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "varsel/rng.hpp"

namespace varsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kExhaustiveGuard = 25;

} // namespace

ModelScorer::ModelScorer(const Dataset& data, Criterion criterion)
    : data_(&data), criterion_(criterion) {
    if (data.family == Family::Gaussian) precomp_ = LmPrecomp::build(data);
}

FittedModel ModelScorer::fit(const ModelSpec& spec) const {
    if (precomp_) return fit_lm_subset(*precomp_, spec);
    return fit_glm(*data_, spec);
}

double ModelScorer::score(const ModelSpec& spec) const {
    try {
        return evaluate(criterion_, fit(spec), data_->n());
    } catch (const Error&) {
        return kInf;
    }
}

double ModelScorer::score(const FittedModel& fit) const {
    return evaluate(criterion_, fit, data_->n());
}

SearchResult exhaustive_search(const Dataset& data, Criterion criterion,
                               const SearchOptions& options) {
    const int p = data.p();
    if (p > kExhaustiveGuard)
        throw SpaceTooLargeError("exhaustive search guarded at p <= " +
                                 std::to_string(kExhaustiveGuard) + ", got p = " +
                                 std::to_string(p));
    const ModelScorer scorer(data, criterion);
    const std::uint64_t n_models = std::uint64_t{1} << p;

    SearchResult result;
    result.n_models_evaluated = n_models;
    bool have_best = false;
    ModelSpec best_spec;
    double best_score = kInf;

    for (std::uint64_t mask = 0; mask < n_models; ++mask) {
        const ModelSpec spec = ModelSpec::from_mask(p, mask);
        const double score = scorer.score(spec);
        if (!std::isfinite(score)) {
            ++result.n_skipped;
            continue;
        }
        if (options.keep_trace) result.trace.emplace_back(spec, score);
        if (!have_best || score_spec_better(score, spec, best_score, best_spec)) {
            have_best = true;
            best_spec = spec;
            best_score = score;
        }
    }
    if (!have_best) throw AllModelsDegenerateError("no spec produced a finite fit");
    result.best = scorer.fit(best_spec);
    result.best_score = best_score;
    return result;
}

SearchResult stepwise_search(const Dataset& data, Criterion criterion,
                             const ModelSpec& start, StepwiseDirection direction,
                             const SearchOptions& options) {
    if (start.width() != data.p())
        throw DimensionError("start spec width does not match dataset p");
    const ModelScorer scorer(data, criterion);

    SearchResult result;
    ModelSpec current = start;
    double current_score = scorer.score(current);
    result.n_models_evaluated = 1;
    if (!std::isfinite(current_score))
        throw AllModelsDegenerateError("starting spec failed to fit");
    if (options.keep_trace) result.trace.emplace_back(current, current_score);

    for (;;) {
        bool have_candidate = false;
        ModelSpec best_neighbor;
        double best_neighbor_score = kInf;
        for (int j = 0; j < data.p(); ++j) {
            const bool adding = !current.test(j);
            if (adding && direction == StepwiseDirection::Backward) continue;
            if (!adding && direction == StepwiseDirection::Forward) continue;
            ModelSpec neighbor = current;
            neighbor.flip(j);
            const double s = scorer.score(neighbor);
            ++result.n_models_evaluated;
            if (!std::isfinite(s)) {
                ++result.n_skipped;
                continue;
            }
            if (!have_candidate ||
                score_spec_better(s, neighbor, best_neighbor_score, best_neighbor)) {
                have_candidate = true;
                best_neighbor = neighbor;
                best_neighbor_score = s;
            }
        }
        if (!have_candidate || best_neighbor_score >= current_score) break;
        current = best_neighbor;
        current_score = best_neighbor_score;
        if (options.keep_trace) result.trace.emplace_back(current, current_score);
    }

    result.best = scorer.fit(current);
    result.best_score = current_score;
    return result;
}

SearchResult stepwise_search(const Dataset& data, Criterion criterion,
                             const SearchOptions& options) {
    return stepwise_search(data, criterion, data.null_spec(), StepwiseDirection::Both,
                           options);
}

void GAConfig::validate(int p) const {
    if (population_size < 2) throw Error("GA population_size must be >= 2");
    if (max_generations < 1) throw Error("GA max_generations must be >= 1");
    if (stall_generations < 1) throw Error("GA stall_generations must be >= 1");
    if (crossover_prob < 0.0 || crossover_prob > 1.0)
        throw Error("GA crossover_prob must be in [0, 1]");
    if (mutation_prob_per_gene > 1.0)
        throw Error("GA mutation_prob_per_gene must be <= 1");
    if (elite_fraction * population_size < 1.0)
        throw Error("GA elite_fraction * population_size must be >= 1");
    for (const ModelSpec& s : initial_population)
        if (s.width() != p) throw DimensionError("initial chromosome width != p");
}

SearchResult ga_search(const Dataset& data, Criterion criterion, const GAConfig& config,
                       const SearchOptions& options) {
    const int p = data.p();
    if (p < 1) throw Error("ga_search requires p >= 1");
    config.validate(p);
    const double mutation_prob =
        config.mutation_prob_per_gene < 0.0 ? 1.0 / p : config.mutation_prob_per_gene;
    const int pop_size = config.population_size;
    const int n_elite = std::max(1, static_cast<int>(config.elite_fraction * pop_size));

    const ModelScorer scorer(data, criterion);
    RandomStream rng(config.seed);

    std::unordered_map<ModelSpec, double, ModelSpecHash> cache;
    std::size_t n_fits = 0;
    std::size_t n_failed = 0;
    auto fitness = [&](const ModelSpec& spec) {
        auto it = cache.find(spec);
        if (it != cache.end()) return it->second;
        const double s = scorer.score(spec);
        ++n_fits;
        if (!std::isfinite(s)) ++n_failed;
        cache.emplace(spec, s);
        return s;
    };

    std::vector<ModelSpec> population;
    population.reserve(pop_size);
    for (const ModelSpec& s : config.initial_population) {
        if (static_cast<int>(population.size()) == pop_size) break;
        population.push_back(s);
    }
    while (static_cast<int>(population.size()) < pop_size) {
        ModelSpec s(p);
        for (int j = 0; j < p; ++j) s.set(j, rng.bernoulli(0.5));
        population.push_back(std::move(s));
    }

    std::vector<double> scores(pop_size);
    std::vector<int> order(pop_size); // best-first index order under the tie rule
    auto evaluate_population = [&]() {
        for (int i = 0; i < pop_size; ++i) scores[i] = fitness(population[i]);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return score_spec_better(scores[a], population[a], scores[b], population[b]);
        });
    };
    evaluate_population();

    ModelSpec incumbent = population[order[0]];
    double incumbent_score = scores[order[0]];

    SearchResult result;
    if (options.keep_trace) result.trace.emplace_back(incumbent, incumbent_score);

    // Linear rank weights: best rank gets weight pop_size, worst gets 1.
    const double total_rank_weight = 0.5 * pop_size * (pop_size + 1.0);
    auto select_parent = [&]() -> const ModelSpec& {
        double u = rng.uniform01() * total_rank_weight;
        for (int r = 0; r < pop_size; ++r) {
            u -= pop_size - r;
            if (u <= 0.0) return population[order[r]];
        }
        return population[order[pop_size - 1]];
    };

    int stall = 0;
    for (int gen = 1; gen < config.max_generations && stall < config.stall_generations;
         ++gen) {
        std::vector<ModelSpec> next;
        next.reserve(pop_size);
        for (int e = 0; e < n_elite; ++e) next.push_back(population[order[e]]);
        while (static_cast<int>(next.size()) < pop_size) {
            const ModelSpec& pa = select_parent();
            const ModelSpec& pb = select_parent();
            ModelSpec child(p);
            if (rng.bernoulli(config.crossover_prob)) {
                for (int j = 0; j < p; ++j)
                    child.set(j, rng.bernoulli(0.5) ? pa.test(j) : pb.test(j));
            } else {
                child = pa;
            }
            for (int j = 0; j < p; ++j)
                if (rng.bernoulli(mutation_prob)) child.flip(j);
            next.push_back(std::move(child));
        }
        population = std::move(next);
        evaluate_population();

        const double gen_best = scores[order[0]];
        if (gen_best < incumbent_score) {
            incumbent = population[order[0]];
            incumbent_score = gen_best;
            stall = 0;
        } else {
            if (gen_best == incumbent_score &&
                score_spec_better(gen_best, population[order[0]], incumbent_score,
                                  incumbent)) {
                incumbent = population[order[0]]; // same score, preferable under tie rule
            }
            ++stall;
        }
        if (options.keep_trace) result.trace.emplace_back(incumbent, incumbent_score);
    }

    if (!std::isfinite(incumbent_score))
        throw AllModelsDegenerateError("every chromosome failed to fit");
    result.best = scorer.fit(incumbent);
    result.best_score = incumbent_score;
    result.n_models_evaluated = n_fits;
    result.n_skipped = n_failed;
    return result;
}

} // namespace varsel
