#pragma once

#include <optional>
#include <span>
#include <vector>

#include "common.hpp"
#include "estimate.hpp"
#include "schema.hpp"

namespace decomod {

// A sense index, or abstention when no sense has positive estimated
// probability for the context (including contexts with unseen level values).
struct Prediction {
    std::optional<int> sense;
    bool abstained() const { return !sense.has_value(); }
};

// Argmax over senses of the fitted joint at (context, sense). Ties go to the
// lowest sense index; a zero maximum or an out-of-range context value means
// the needed parameters cannot be estimated, so the classifier abstains.
inline Prediction predict(const FittedModel& model, std::span<const int> context) {
    const Schema& schema = model.schema;
    const int n_features = schema.class_index();
    if (static_cast<int>(context.size()) != n_features) {
        throw model_error("context arity does not match the model's feature count");
    }
    for (int i = 0; i < n_features; ++i) {
        if (context[static_cast<std::size_t>(i)] < 0 ||
            context[static_cast<std::size_t>(i)] >= schema.levels_of(i)) {
            return Prediction{};  // unseen level: no estimate exists
        }
    }
    std::vector<int> instance(context.begin(), context.end());
    instance.push_back(0);
    double best = 0.0;
    std::optional<int> best_sense;
    const int n_senses = schema.levels_of(schema.class_index());
    for (int s = 0; s < n_senses; ++s) {
        instance.back() = s;
        const double p = joint_probability(model, instance);
        if (p > best) {
            best = p;
            best_sense = s;
        }
    }
    return Prediction{best_sense};
}

// Constant predictor of the modal training sense (ties to the lowest index).
struct DefaultClassifier {
    int modal_sense = 0;
    Prediction operator()(std::span<const int>) const { return Prediction{modal_sense}; }
};

inline DefaultClassifier default_classifier(const Dataset& train) {
    const int cls = train.schema.class_index();
    std::vector<long long> counts(static_cast<std::size_t>(train.schema.levels_of(cls)), 0);
    for (const Row& row : train.rows) {
        counts[static_cast<std::size_t>(row.values[static_cast<std::size_t>(cls)])] += row.count;
    }
    int best = 0;
    for (int s = 1; s < static_cast<int>(counts.size()); ++s) {
        if (counts[static_cast<std::size_t>(s)] > counts[static_cast<std::size_t>(best)]) best = s;
    }
    return DefaultClassifier{best};
}

struct Metrics {
    double accuracy = 0.0;  // correct / n_test; abstentions count as incorrect
    double recall = 0.0;    // (n_test - n_abstained) / n_test
    long long n_test = 0;
    long long n_abstained = 0;
};

// Evaluates any predictor callable as (feature values) -> Prediction against
// a labeled test set. Row multiplicities weight the tallies.
template <typename Predictor>
Metrics evaluate(const Predictor& predictor, const Dataset& test) {
    if (test.total < 1) throw model_error("test set is empty");
    const std::size_t cls = static_cast<std::size_t>(test.schema.class_index());
    Metrics m;
    long long correct = 0;
    for (const Row& row : test.rows) {
        std::span<const int> context(row.values.data(), cls);
        const Prediction p = predictor(context);
        m.n_test += row.count;
        if (p.abstained()) {
            m.n_abstained += row.count;
        } else if (*p.sense == row.values[cls]) {
            correct += row.count;
        }
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(m.n_test);
    m.recall =
        static_cast<double>(m.n_test - m.n_abstained) / static_cast<double>(m.n_test);
    return m;
}

inline Metrics evaluate(const FittedModel& model, const Dataset& test) {
    return evaluate([&model](std::span<const int> ctx) { return predict(model, ctx); }, test);
}

}  // namespace decomod
