#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "tabaudit/error.hpp"
#include "tabaudit/prompt.hpp"

namespace tabaudit::prompt {

namespace {

std::string normalized(std::string_view name) {
    std::string out;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

bool same_header(const TabularDataset& a, const TabularDataset& b) {
    if (a.feature_count() != b.feature_count()) return false;
    for (std::size_t i = 0; i < a.feature_count(); ++i) {
        if (normalized(a.feature(i).name) != normalized(b.feature(i).name)) return false;
    }
    return true;
}

PoolEntry entry_from_json(const nlohmann::json& j) {
    PoolEntry e;
    e.name = j.at("name").get<std::string>();
    if (j.contains("aliases")) e.aliases = j.at("aliases").get<std::vector<std::string>>();
    e.data = load_csv(j.at("csv").get<std::string>(), e.name);
    e.sample = j.at("sample").get<std::string>();
    e.completion_given = j.at("completion").at("given").get<std::string>();
    e.completion_rest = j.at("completion").at("rest").get<std::string>();
    e.header_row = j.at("header").at("row").get<std::size_t>();
    const auto prefix = j.at("header").at("prefix").get<std::string>();
    if (e.header_row >= e.data.row_count()) {
        throw ConfigError("pool entry '" + e.name + "': header row outside the excerpt");
    }
    const auto& line = e.data.raw_lines()[e.header_row];
    if (prefix.empty() || prefix.size() >= line.size() || line.compare(0, prefix.size(), prefix) != 0) {
        throw ConfigError("pool entry '" + e.name + "': header prefix is not a proper prefix of row " +
                          std::to_string(e.header_row));
    }
    e.header_cut = prefix.size();
    return e;
}

}  // namespace

FewShotPool::FewShotPool(std::vector<PoolEntry> entries, PoolEntry substitute)
    : entries_(std::move(entries)), substitute_(std::move(substitute)) {
    if (entries_.empty()) throw ConfigError("few-shot pool is empty");
}

FewShotPool FewShotPool::from_json(const nlohmann::json& j) {
    try {
        std::vector<PoolEntry> entries;
        for (const auto& e : j.at("entries")) entries.push_back(entry_from_json(e));
        return FewShotPool(std::move(entries), entry_from_json(j.at("substitute")));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid few-shot pool: ") + e.what());
    } catch (const MalformedCsv& e) {
        throw ConfigError(std::string("invalid few-shot pool excerpt: ") + e.what());
    } catch (const EmptyDataset& e) {
        throw ConfigError(std::string("invalid few-shot pool excerpt: ") + e.what());
    }
}

FewShotPool FewShotPool::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open few-shot pool " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("few-shot pool " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

bool FewShotPool::matches(const PoolEntry& entry, const TabularDataset& audited) const {
    const std::string name = normalized(audited.name());
    if (!name.empty()) {
        if (normalized(entry.name) == name) return true;
        for (const auto& alias : entry.aliases) {
            if (normalized(alias) == name) return true;
        }
    }
    return same_header(entry.data, audited);
}

std::vector<const PoolEntry*> FewShotPool::examples_for(const TabularDataset& audited) const {
    std::vector<const PoolEntry*> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(matches(e, audited) ? &substitute_ : &e);
    return out;
}

const FewShotPool& default_pool() {
    static const FewShotPool pool = FewShotPool::from_json(nlohmann::json::parse(default_pool_json()));
    return pool;
}

}  // namespace tabaudit::prompt
