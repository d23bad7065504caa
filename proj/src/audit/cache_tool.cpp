#include <fstream>
#include <set>

#include "tabaudit/audit.hpp"
#include "tabaudit/error.hpp"

namespace tabaudit::audit {

CacheSummary inspect_cache(const std::filesystem::path& path) {
    CacheSummary s;
    for (const auto& t : llm::read_transcripts(path)) {
        ++s.transcripts;
        auto& m = s.models[t.model];
        ++m.transcripts;
        if (m.first_timestamp.empty() || t.timestamp < m.first_timestamp) m.first_timestamp = t.timestamp;
        if (t.timestamp > m.last_timestamp) m.last_timestamp = t.timestamp;
    }
    return s;
}

std::vector<CacheMismatch> verify_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open cache file " + path.string());
    std::vector<CacheMismatch> out;
    std::set<std::string> seen;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        llm::Transcript t;
        try {
            t = llm::transcript_from_json(nlohmann::json::parse(line));
        } catch (const std::exception& e) {
            out.push_back({number, std::string("unparseable transcript: ") + e.what()});
            continue;
        }
        if (auto problem = llm::transcript_problem(t)) {
            out.push_back({number, *problem});
        } else if (!seen.insert(t.request_digest).second) {
            out.push_back({number, "duplicate request_digest " + t.request_digest});
        }
    }
    return out;
}

std::size_t merge_caches(const std::vector<std::filesystem::path>& inputs, const std::filesystem::path& out) {
    std::vector<llm::Transcript> merged;
    std::set<std::string> seen;
    for (const auto& p : inputs) {
        for (auto& t : llm::read_transcripts(p)) {
            if (seen.insert(t.request_digest).second) merged.push_back(std::move(t));
        }
    }
    auto tmp = out;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write " + tmp.string());
        for (const auto& t : merged) f << llm::transcript_line(t) << '\n';
        if (!f.flush()) throw Error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, out);
    return merged.size();
}

std::string render_summary(const CacheSummary& s) {
    std::string out = std::to_string(s.transcripts) + " transcripts\n";
    for (const auto& [model, m] : s.models) {
        out += model + ": " + std::to_string(m.transcripts) + " transcripts, " + m.first_timestamp + " .. " +
               m.last_timestamp + "\n";
    }
    return out;
}

}  // namespace tabaudit::audit
