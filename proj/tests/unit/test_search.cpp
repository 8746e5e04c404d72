#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "varsel/search.hpp"
#include "varsel/simgen.hpp"

using namespace varsel;

TEST_SUITE_BEGIN("search");

namespace {

// Independent brute-force minimizer over every bit pattern: public fitting
// entry points, its own loop and tie-breaking.
std::pair<ModelSpec, double> brute_force_best(const Dataset& data, Criterion criterion) {
    ModelSpec best;
    double best_score = std::numeric_limits<double>::infinity();
    bool have = false;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << data.p()); ++mask) {
        const ModelSpec spec = ModelSpec::from_mask(data.p(), mask);
        double s;
        try {
            s = evaluate(criterion, fit_model(data, spec), data.n());
        } catch (const Error&) {
            continue;
        }
        bool better = false;
        if (!have || s < best_score)
            better = true;
        else if (s == best_score && spec.count() < best.count())
            better = true;
        else if (s == best_score && spec.count() == best.count() &&
                 spec_lex_less(spec, best))
            better = true;
        if (better) {
            have = true;
            best = spec;
            best_score = s;
        }
    }
    REQUIRE(have);
    return {best, best_score};
}

} // namespace

TEST_CASE("exhaustive search on an empty model space") {
    Eigen::MatrixXd x(5, 0);
    const Dataset data(testutil::vec({1, 2, 1, 3, 2}), x, Family::Gaussian);
    const SearchResult r = exhaustive_search(data, Criterion::BIC);
    CHECK(r.n_models_evaluated == 1);
    CHECK(r.best.spec.count() == 0);
}

TEST_CASE("exhaustive BIC recovers a strong single-regressor truth") {
    SimSetting s = SimSetting::study1(Family::Gaussian, 1000, 0.0, 1.0, 42);
    s.p = 2;
    s.true_support = ModelSpec::from_indices(2, {0});
    const Dataset data = gen_dataset(s);
    const SearchResult r = exhaustive_search(data, Criterion::BIC);
    CHECK(r.best.spec == s.true_support);
    CHECK(r.n_models_evaluated == 4);

    const auto [oracle_spec, oracle_score] = brute_force_best(data, Criterion::BIC);
    CHECK(r.best.spec == oracle_spec);
    CHECK(r.best_score == doctest::Approx(oracle_score).epsilon(1e-9));
}

TEST_CASE("exhaustive search matches the brute-force oracle") {
    int inst = 0;
    for (Family family : {Family::Gaussian, Family::Bernoulli, Family::Poisson}) {
        for (Criterion criterion : {Criterion::AIC, Criterion::BIC}) {
            const int p = 2 + (inst % 5);
            const Dataset data =
                testutil::random_instance(family, 40 + 10 * inst, p, 900 + inst);
            const SearchResult r = exhaustive_search(data, criterion);
            const auto [oracle_spec, oracle_score] = brute_force_best(data, criterion);
            CHECK(r.best.spec == oracle_spec);
            CHECK(r.best_score == doctest::Approx(oracle_score).epsilon(1e-9));
            ++inst;
        }
    }
}

TEST_CASE("exhaustive trace covers the model space") {
    const Dataset data = testutil::random_instance(Family::Gaussian, 30, 4, 5);
    SearchOptions opts;
    opts.keep_trace = true;
    const SearchResult r = exhaustive_search(data, Criterion::AIC, opts);
    CHECK(r.trace.size() + r.n_skipped == 16);
}

TEST_CASE("exhaustive guard rejects large p") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 26);
    const Dataset data(testutil::vec({1, 2, 3}), x, Family::Gaussian);
    CHECK_THROWS_AS(exhaustive_search(data, Criterion::BIC), SpaceTooLargeError);
}

TEST_CASE("stepwise stops immediately at a null optimum") {
    // Pure noise with a null-optimal BIC: one sweep, no move.
    SimSetting s = SimSetting::study1(Family::Gaussian, 400, 0.0, 1.0, 7);
    s.true_support = ModelSpec(6);
    s.beta0 = 0.0;
    const Dataset data = gen_dataset(s);
    const SearchResult ex = exhaustive_search(data, Criterion::BIC);
    REQUIRE(ex.best.spec.count() == 0); // seed chosen so null wins

    SearchOptions opts;
    opts.keep_trace = true;
    const SearchResult r = stepwise_search(data, Criterion::BIC, opts);
    CHECK(r.best.spec.count() == 0);
    CHECK(r.trace.size() == 1);
    CHECK(r.n_models_evaluated == 1 + 6);
}

TEST_CASE("stepwise equals exhaustive under an orthogonal strong design") {
    const SimSetting s = SimSetting::study1(Family::Gaussian, 500, 0.0, 1.0, 12);
    const Dataset data = gen_dataset(s);
    const SearchResult step = stepwise_search(data, Criterion::BIC);
    const SearchResult ex = exhaustive_search(data, Criterion::BIC);
    CHECK(step.best.spec == ex.best.spec);
    CHECK(step.best_score == doctest::Approx(ex.best_score).epsilon(1e-10));
}

TEST_CASE("stepwise can stop at a local optimum the exhaustive search beats") {
    // y depends on x1 + x2 whose sum has tiny variance (x2 ~ -x1), so no
    // single addition beats the null penalty but the pair fits well.
    RandomStream rng(2024);
    const int n = 4000;
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd y(n);
    const double gamma = 0.01;
    for (int i = 0; i < n; ++i) {
        const double z1 = rng.normal(), z2 = rng.normal();
        x(i, 0) = z1;
        x(i, 1) = -(1.0 - gamma) * z1 + std::sqrt(2.0 * gamma - gamma * gamma) * z2;
        y[i] = x(i, 0) + x(i, 1) + rng.normal();
    }
    const Dataset data(std::move(y), std::move(x), Family::Gaussian);

    const SearchResult ex = exhaustive_search(data, Criterion::BIC);
    REQUIRE(ex.best.spec == ModelSpec::from_indices(2, {0, 1}));

    const SearchResult step = stepwise_search(data, Criterion::BIC);
    CHECK(step.best.spec.count() == 0);
    CHECK(step.best_score > ex.best_score);
}

TEST_CASE("stepwise accepted moves strictly improve and stay bounded") {
    const Dataset data = testutil::random_instance(Family::Gaussian, 150, 8, 33, 0.6);
    SearchOptions opts;
    opts.keep_trace = true;
    const SearchResult r = stepwise_search(data, Criterion::AIC, opts);
    REQUIRE(!r.trace.empty());
    for (std::size_t i = 1; i < r.trace.size(); ++i)
        CHECK(r.trace[i].second < r.trace[i - 1].second);
    const std::size_t moves = r.trace.size() - 1;
    CHECK(moves <= static_cast<std::size_t>(8 * 8 + 8));
    CHECK(r.best_score == r.trace.back().second);
}

TEST_CASE("GA finds the exhaustive optimum on a small space") {
    const SimSetting s = SimSetting::study1(Family::Gaussian, 300, 0.25, 4.0, 99);
    const Dataset data = gen_dataset(s);
    GAConfig cfg;
    cfg.seed = 17;
    const SearchResult ga = ga_search(data, Criterion::BIC, cfg);
    const SearchResult ex = exhaustive_search(data, Criterion::BIC);
    CHECK(ga.best_score == doctest::Approx(ex.best_score).epsilon(1e-12));
    CHECK(ga.best.spec == ex.best.spec);
}

TEST_CASE("elitism never loses a seeded optimum") {
    const Dataset data = testutil::random_instance(Family::Gaussian, 100, 6, 4242);
    const SearchResult ex = exhaustive_search(data, Criterion::BIC);
    GAConfig cfg;
    cfg.seed = 5;
    cfg.max_generations = 30;
    cfg.initial_population = {ex.best.spec};
    const SearchResult ga = ga_search(data, Criterion::BIC, cfg);
    CHECK(ga.best.spec == ex.best.spec);
    CHECK(ga.best_score == doctest::Approx(ex.best_score).epsilon(1e-12));
}

TEST_CASE("GA is deterministic given the seed") {
    const Dataset data = testutil::random_instance(Family::Gaussian, 120, 8, 808);
    GAConfig cfg;
    cfg.seed = 31337;
    SearchOptions opts;
    opts.keep_trace = true;
    const SearchResult a = ga_search(data, Criterion::AIC, cfg, opts);
    const SearchResult b = ga_search(data, Criterion::AIC, cfg, opts);
    CHECK(a.best.spec == b.best.spec);
    CHECK(a.best_score == b.best_score);
    CHECK(a.n_models_evaluated == b.n_models_evaluated);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].first == b.trace[i].first);
        CHECK(a.trace[i].second == b.trace[i].second);
    }
}

TEST_CASE("GA incumbent is monotone across generations") {
    const Dataset data = testutil::random_instance(Family::Bernoulli, 150, 7, 61);
    GAConfig cfg;
    cfg.seed = 9;
    SearchOptions opts;
    opts.keep_trace = true;
    const SearchResult r = ga_search(data, Criterion::BIC, cfg, opts);
    for (std::size_t i = 1; i < r.trace.size(); ++i)
        CHECK(r.trace[i].second <= r.trace[i - 1].second);
}

TEST_CASE("exhaustive dominates stepwise and GA") {
    int inst = 0;
    for (Family family : {Family::Gaussian, Family::Bernoulli}) {
        const Dataset data = testutil::random_instance(family, 90, 6, 700 + inst++);
        for (Criterion criterion : {Criterion::AIC, Criterion::BIC}) {
            const SearchResult ex = exhaustive_search(data, criterion);
            const SearchResult st = stepwise_search(data, criterion);
            GAConfig cfg;
            cfg.seed = 1;
            const SearchResult ga = ga_search(data, criterion, cfg);
            CHECK(ex.best_score <= st.best_score + 1e-12);
            CHECK(ex.best_score <= ga.best_score + 1e-12);
        }
    }
}

TEST_CASE("pure forward and backward variants respect their move sets") {
    const SimSetting s = SimSetting::study1(Family::Gaussian, 300, 0.25, 6.25, 5150);
    const Dataset data = gen_dataset(s);
    SearchOptions opts;
    opts.keep_trace = true;

    const SearchResult fwd = stepwise_search(data, Criterion::BIC, data.null_spec(),
                                             StepwiseDirection::Forward, opts);
    for (std::size_t i = 1; i < fwd.trace.size(); ++i) {
        CHECK(fwd.trace[i - 1].first.subset_of(fwd.trace[i].first));
        CHECK(fwd.trace[i].first.count() == fwd.trace[i - 1].first.count() + 1);
    }

    const SearchResult bwd = stepwise_search(data, Criterion::BIC, data.full_spec(),
                                             StepwiseDirection::Backward, opts);
    for (std::size_t i = 1; i < bwd.trace.size(); ++i) {
        CHECK(bwd.trace[i].first.subset_of(bwd.trace[i - 1].first));
        CHECK(bwd.trace[i].first.count() == bwd.trace[i - 1].first.count() - 1);
    }
    // On this strong-signal data both directions land on the same optimum.
    CHECK(fwd.best.spec == bwd.best.spec);
}

TEST_CASE("rank-deficient specs are skipped, not fatal") {
    RandomStream rng(404);
    Eigen::MatrixXd x(40, 3);
    for (int i = 0; i < 40; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = x(i, 0); // exact duplicate
        x(i, 2) = rng.normal();
    }
    Eigen::VectorXd y(40);
    for (int i = 0; i < 40; ++i) y[i] = 2.0 * x(i, 0) + rng.normal();
    const Dataset data(std::move(y), std::move(x), Family::Gaussian);

    const SearchResult ex = exhaustive_search(data, Criterion::BIC);
    CHECK(ex.n_skipped == 2); // the two specs containing both duplicates
    CHECK(ex.n_models_evaluated == 8);
    CHECK_FALSE((ex.best.spec.test(0) && ex.best.spec.test(1)));

    // Stepwise from {x1}: adding the duplicate is skipped, no throw.
    const SearchResult st = stepwise_search(data, Criterion::BIC);
    CHECK(st.n_skipped > 0);
    CHECK(st.best_score >= ex.best_score - 1e-9);
}

TEST_CASE("a constant response makes every model degenerate") {
    Eigen::MatrixXd x(10, 2);
    RandomStream rng(6);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 2; ++j) x(i, j) = rng.normal();
    const Dataset data(Eigen::VectorXd::Constant(10, 3.0), x, Family::Gaussian);
    CHECK_THROWS_AS(exhaustive_search(data, Criterion::BIC), AllModelsDegenerateError);
}

TEST_CASE("Poisson selection is invariant to the factorial constant") {
    // The -log(y_i!) term is constant per dataset, so shifting every model's
    // log-likelihood by it cannot change the criterion ranking.
    const Dataset data = testutil::random_instance(Family::Poisson, 80, 4, 1900);
    double constant = 0.0;
    for (int i = 0; i < data.n(); ++i) constant += std::lgamma(data.y[i] + 1.0);

    for (Criterion criterion : {Criterion::AIC, Criterion::BIC}) {
        ModelSpec best_kept, best_dropped;
        double score_kept = 0.0, score_dropped = 0.0;
        bool have = false;
        for (std::uint64_t mask = 0; mask < 16; ++mask) {
            const ModelSpec spec = ModelSpec::from_mask(4, mask);
            const FittedModel fit = fit_glm(data, spec);
            const double with_c = evaluate(criterion, fit.loglik, fit.k, data.n());
            const double without_c =
                evaluate(criterion, fit.loglik + constant, fit.k, data.n());
            if (!have || with_c < score_kept) {
                best_kept = spec;
                score_kept = with_c;
            }
            if (!have || without_c < score_dropped) {
                best_dropped = spec;
                score_dropped = without_c;
            }
            have = true;
        }
        CHECK(best_kept == best_dropped);
    }
}

TEST_CASE("GA config validation") {
    GAConfig cfg;
    cfg.population_size = 1;
    CHECK_THROWS_AS(cfg.validate(4), Error);
    cfg = GAConfig{};
    cfg.elite_fraction = 0.001; // 100 * 0.001 < 1
    CHECK_THROWS_AS(cfg.validate(4), Error);
    cfg = GAConfig{};
    cfg.crossover_prob = 1.5;
    CHECK_THROWS_AS(cfg.validate(4), Error);
}

TEST_SUITE_END();
