#pragma once

#include <string>
#include <vector>

#include "fixtures.hpp"
#include "tabaudit/prompt.hpp"

namespace fixture {

struct GoldenCase {
    std::string file;  // relative to prompts/
    std::string text;
};

inline tabaudit::prompt::PredictionPersona diabetes_persona() {
    tabaudit::prompt::PredictionPersona p;
    p.persona =
        "You are a helpful statistician, data scientist, and board-certified medical doctor with expertise in treating "
        "diabetes.";
    p.dataset_label = "openml diabetes";
    p.task = "Your task is to predict whether a patient tested positive or negative for diabetes.";
    p.labels = {{"1", "the patient tested positive for diabetes"}, {"0", "the patient tested negative for diabetes"}};
    return p;
}

inline const std::string& adult_header_prefix() {
    static const std::string kept = "38, Private,215646, HS-grad,9, Divorced, Handlers-cleane";
    return kept;
}

// Builder output for the fixed fixtures, one entry per committed golden.
inline std::vector<GoldenCase> golden_cases() {
    using namespace tabaudit::prompt;
    const auto& pool = default_pool();
    const auto adult = load("adult.csv");
    const auto titanic = load("titanic.csv");
    const auto diabetes = load("diabetes.csv");
    const std::vector<std::size_t> fc_shots{11, 12, 13, 14, 15};
    const std::vector<std::size_t> pred_shots{0, 1};

    std::vector<GoldenCase> out;
    out.push_back({"golden/feature-names.txt", render_conversation(build_feature_names(load("fico.csv"), pool))});
    out.push_back({"golden/conditional-completion.txt",
                   render_conversation(build_conditional_completion(adult, 10, 6, pool))});
    out.push_back({"golden/zk-sampling.txt", render_conversation(build_zk_sample(titanic, pool, 0.7))});
    out.push_back({"golden/header.txt",
                   render_conversation(build_header(adult, tabaudit::split_at(adult, 2, adult_header_prefix().size()), pool))});
    out.push_back({"golden/row-completion.txt", render_conversation(build_row_completion(titanic, 0, 15, pool))});
    out.push_back({"golden/feature-completion.txt",
                   render_conversation(build_feature_completion(adult, 16, *adult.feature_index("fnlwgt"), fc_shots))});
    out.push_back({"golden/prediction.txt",
                   render_conversation(build_prediction(diabetes, *diabetes.feature_index("Outcome"), pred_shots, 2,
                                                        diabetes_persona()))});
    for (auto kind : {PromptKind::FeatureNames, PromptKind::ZkSample, PromptKind::ConditionalCompletion,
                      PromptKind::Header, PromptKind::RowCompletion, PromptKind::FeatureCompletion}) {
        out.push_back({"system/" + std::string(to_string(kind)) + ".txt", system_message(kind)});
    }
    return out;
}

}  // namespace fixture
