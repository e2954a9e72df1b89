#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tfnet/trainer.hpp"

#include <cmath>
#include <limits>

using namespace tfnet;

namespace {

// Small 32 x 32 corpus so the loop runs in well under a second.
std::vector<ImagePair> small_pairs(std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ImagePair> pairs;
    for (std::size_t i = 0; i < count; ++i) {
        auto spec = sample_params(SignalClass::TwoNlfm, rng, 32);
        spec.noise_snr_db = 10.0;
        spec.noise_seed = rng.next_u64();
        pairs.push_back(build_sample(spec));
    }
    return pairs;
}

}  // namespace

TEST_CASE("evaluate_loss matches the loss definition") {
    const auto pairs = small_pairs(3, 1);
    const auto net = init_weights<float>(3, 4, 3, 2);
    std::vector<TFImage> predictions;
    std::vector<TFImage> labels;
    for (const auto& pair : pairs) {
        predictions.push_back(forward(net, pair.input));
        labels.push_back(pair.label);
    }
    CHECK(evaluate_loss(net, pairs) == doctest::Approx(mse_loss(predictions, labels)).epsilon(1e-12));
}

TEST_CASE("train") {
    const auto train_set = small_pairs(10, 3);
    const auto val_set = small_pairs(4, 4);
    const auto initial = init_weights<float>(3, 6, 3, 5);
    TrainConfig config;
    config.batch_size = 4;
    config.epochs = 4;
    config.shuffle_seed = 6;

    SUBCASE("returned model is no worse than the initial one on validation") {
        const auto result = train(initial, train_set, val_set, config);
        CHECK(result.history.validation.size() == 4);
        CHECK(result.history.batches.size() == 12);
        CHECK(result.history.steps == 12);
        CHECK(result.history.initial_validation == doctest::Approx(evaluate_loss(initial, val_set)));
        const double kept = evaluate_loss(result.network, val_set);
        CHECK(kept <= result.history.initial_validation);
        CHECK(kept == doctest::Approx(result.history.best_validation).epsilon(1e-12));
        CHECK(result.network.info.train_seed == 6);
    }
    SUBCASE("fixed seeds reproduce the history exactly") {
        const auto first = train(initial, train_set, val_set, config);
        const auto second = train(initial, train_set, val_set, config);
        REQUIRE(first.history.batches.size() == second.history.batches.size());
        for (std::size_t i = 0; i < first.history.batches.size(); ++i) {
            CHECK(first.history.batches[i].loss == second.history.batches[i].loss);
        }
        CHECK(first.history.validation == second.history.validation);
        for (std::size_t l = 0; l < first.network.layers.size(); ++l) {
            CHECK(first.network.layers[l].weights == second.network.layers[l].weights);
        }
        config.shuffle_seed = 7;
        const auto other = train(initial, train_set, val_set, config);
        CHECK(other.history.batches[0].loss != first.history.batches[0].loss);
    }
    SUBCASE("step limit and observer stop training") {
        config.max_steps = 5;
        CHECK(train(initial, train_set, val_set, config).history.steps == 5);
        config.max_steps = 0;
        std::size_t seen = 0;
        const auto result = train(initial, train_set, val_set, config, [&](const TrainEvent& event) {
            if (event.kind == TrainEvent::Kind::Batch) ++seen;
            return event.step < 2;
        });
        CHECK(result.history.steps == 2);
        CHECK(seen == 2);
        CHECK(result.history.validation.size() == 1);
    }
    SUBCASE("patience ends a stalled run") {
        config.learning_rate = 0.0;
        config.patience = 2;
        config.epochs = 10;
        const auto result = train(initial, train_set, val_set, config);
        CHECK(result.history.validation.size() == 2);
        CHECK(result.history.best_epoch == 0);
    }
    SUBCASE("a non-finite loss aborts") {
        auto poisoned = train_set;
        poisoned[3].label(0, 0) = std::numeric_limits<double>::quiet_NaN();
        config.batch_size = 10;
        CHECK_THROWS_AS(train(initial, poisoned, val_set, config), TrainingDiverged);
        config.learning_rate = 1e30;
        config.batch_size = 4;
        config.epochs = 50;
        CHECK_THROWS_AS(train(initial, train_set, val_set, config), TrainingDiverged);
    }
    SUBCASE("empty sets are rejected") {
        CHECK_THROWS_AS(train(initial, {}, val_set, config), std::invalid_argument);
    }
}

TEST_CASE("small network overfits eight samples") {
    const auto pairs = small_pairs(8, 9);
    const auto net = init_weights<float>(6, 16, 5, 10);
    TrainConfig config;
    config.batch_size = 8;
    config.epochs = 2000;
    config.patience = 2000;
    config.learning_rate = 3e-3;
    config.shuffle_seed = 11;
    double initial = 0.0;
    double last = 0.0;
    train(net, pairs, pairs, config, [&](const TrainEvent& event) {
        if (event.kind != TrainEvent::Kind::Batch) return true;
        if (event.step == 1) initial = event.loss;
        last = event.loss;
        return last >= 0.01 * initial;
    });
    CHECK(last < 0.01 * initial);
}
