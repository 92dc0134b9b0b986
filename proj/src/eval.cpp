#include "pltr/eval.hpp"

#include <stdexcept>

#include <json.hpp>

namespace pltr {

SplitAccuracy evaluate(const PredictFn& predict, const FeatureDataset& test,
                       const ClassStats& train_stats, SplitThresholds th) {
    if (test.size() == 0) throw std::invalid_argument("empty test set");
    const auto splits = split_classes(train_stats, th);

    std::size_t totals[3] = {0, 0, 0};
    std::size_t corrects[3] = {0, 0, 0};
    std::size_t correct_all = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const std::uint32_t label = test.labels[i];
        if (label >= splits.size())
            throw std::invalid_argument("test label " + std::to_string(label) +
                                        " unknown to the training stats");
        const std::size_t s = static_cast<std::size_t>(splits[label]);
        const bool hit = predict(test.features.row(i)) == label;
        ++totals[s];
        if (hit) {
            ++corrects[s];
            ++correct_all;
        }
    }

    SplitAccuracy acc;
    acc.total = test.size();
    acc.all = static_cast<double>(correct_all) / static_cast<double>(test.size());
    acc.many_count = totals[static_cast<std::size_t>(ClassSplit::Many)];
    acc.med_count = totals[static_cast<std::size_t>(ClassSplit::Med)];
    acc.few_count = totals[static_cast<std::size_t>(ClassSplit::Few)];
    auto ratio = [](std::size_t c, std::size_t t) -> std::optional<double> {
        if (t == 0) return std::nullopt;
        return static_cast<double>(c) / static_cast<double>(t);
    };
    acc.many = ratio(corrects[static_cast<std::size_t>(ClassSplit::Many)], acc.many_count);
    acc.med = ratio(corrects[static_cast<std::size_t>(ClassSplit::Med)], acc.med_count);
    acc.few = ratio(corrects[static_cast<std::size_t>(ClassSplit::Few)], acc.few_count);
    return acc;
}

std::string split_accuracy_json(const SplitAccuracy& acc) {
    nlohmann::json j;
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v)
            j[key] = *v;
        else
            j[key] = nullptr;
    };
    put("many", acc.many);
    put("med", acc.med);
    put("few", acc.few);
    j["all"] = acc.all;
    j["counts"] = {{"many", acc.many_count},
                   {"med", acc.med_count},
                   {"few", acc.few_count},
                   {"all", acc.total}};
    return j.dump();
}

}  // namespace pltr
