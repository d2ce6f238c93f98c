#include "classim/llm.hpp"

#include "classim/curriculum.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <condition_variable>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace classim::llm {

using nlohmann::json;

namespace {

constexpr const char* kTemplateNames[] = {"lecture", "notes",  "plan",      "answer",
                                          "judge",   "decompose", "translate", "hyde"};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string var_or(const ChatRequest& req, const std::string& key, const std::string& fallback) {
    auto it = req.variables.find(key);
    return it == req.variables.end() ? fallback : it->second;
}

std::vector<std::string> content_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

std::string first_words(const std::string& text, int n) {
    const auto tokens = content_tokens(text);
    std::ostringstream out;
    for (int i = 0; i < n && i < static_cast<int>(tokens.size()); ++i) {
        if (i) out << ' ';
        out << tokens[i];
    }
    return out.str();
}

// Mock judge rubric: how much of the reference the answer covers
// (token recall, multiset), binned to 1..10. Verbosity is not penalized,
// which keeps grounded-but-wordy answers gradeable.
int overlap_score(const std::string& answer, const std::string& reference) {
    const auto a = content_tokens(answer);
    const auto r = content_tokens(reference);
    if (a.empty()) return 1;
    if (r.empty()) return 1;
    std::map<std::string, int> counts;
    for (const auto& t : r) ++counts[t];
    int overlap = 0;
    for (const auto& t : a) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) return 1;
    const double recall = static_cast<double>(overlap) / r.size();
    return std::max(1, 1 + static_cast<int>(std::lround(recall * 9.0)));
}

}  // namespace

const char* template_name(TemplateId t) { return kTemplateNames[static_cast<int>(t)]; }

std::optional<TemplateId> template_from_name(const std::string& name) {
    for (int i = 0; i < 8; ++i) {
        if (name == kTemplateNames[i]) return static_cast<TemplateId>(i);
    }
    return std::nullopt;
}

void ProviderConfig::validate() const {
    if (kind == ProviderKind::http_chat) {
        if (endpoint.empty()) throw ConfigError("http_chat provider requires an endpoint");
        if (auth_env.empty()) throw ConfigError("http_chat provider requires an auth env var name");
    }
    if (embed_dimension <= 0) throw ConfigError("embed_dimension must be positive");
    if (retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
}

std::vector<Fixture> load_fixtures(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open fixture file: " + path);
    std::vector<Fixture> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        Fixture f;
        const auto id = template_from_name(j.at("template_id").get<std::string>());
        if (!id) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown template_id");
        }
        f.template_id = *id;
        if (j.contains("match")) {
            for (auto& [k, v] : j["match"].items()) f.match[k] = v.get<std::string>();
        }
        f.response = j.at("response").get<std::string>();
        out.push_back(std::move(f));
    }
    return out;
}

std::optional<std::string> MockGateway::fixture_lookup(const ChatRequest& req) const {
    const Fixture* best = nullptr;
    for (const auto& f : fixtures_) {
        if (f.template_id != req.template_id) continue;
        bool ok = true;
        for (const auto& [k, v] : f.match) {
            auto it = req.variables.find(k);
            if (it == req.variables.end() || it->second != v) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        if (!best || f.match.size() > best->match.size()) best = &f;
    }
    if (best) return best->response;
    return std::nullopt;
}

std::string MockGateway::scripted(const ChatRequest& req) const {
    const std::string style = var_or(req, "learning_style", "read_write");
    const std::string question = var_or(req, "question", "");
    switch (req.template_id) {
        case TemplateId::lecture: {
            const std::string topic = var_or(req, "topic", "the scheduled topic");
            std::ostringstream out;
            out << "Lecture on " << topic << ". Key terms:";
            for (const auto& term : curriculum::topic_key_terms(topic)) out << ' ' << term;
            out << ".\n"
                << var_or(req, "directives", "") << "\n"
                << "We begin with the definition of " << topic
                << ", work through examples of " << topic
                << ", and close with a summary connecting " << topic
                << " to earlier material.";
            return out.str();
        }
        case TemplateId::notes: {
            const std::string lecture = var_or(req, "lecture", "");
            const std::string topic = var_or(req, "topic", "the lesson");
            std::string prefix;
            if (style == "visual") {
                prefix = "Diagram notes: sketched boxes and arrows mapping " + topic + ".";
            } else if (style == "auditory") {
                prefix = "Spoken recap notes: phrases to read aloud about " + topic + ".";
            } else if (style == "kinesthetic") {
                prefix = "Hands-on notes: practice steps to act out for " + topic + ".";
            } else if (style == "intuitive") {
                prefix = "Big-picture notes: the core idea of " + topic + " in one line.";
            } else if (style == "analytical") {
                prefix = "Numbered notes: ordered derivation points for " + topic + ".";
            } else {
                prefix = "Outline notes: written summary of " + topic + ".";
            }
            const std::string personality = var_or(req, "personality", "diligent");
            std::ostringstream out;
            out << prefix << " (" << personality << " habits) "
                << first_words(lecture, 48);
            return out.str();
        }
        case TemplateId::plan: {
            // 5..7 steps, wording conditioned on learning style.
            static const char* kThemes[7] = {
                "identify the target of",
                "recall definitions for",
                "connect prerequisites to",
                "apply the rule to",
                "work an example of",
                "check edge cases of",
                "summarize the answer to"};
            static const std::map<std::string, const char*> kStyleFlavors = {
                {"read_write", "write out"},   {"visual", "picture"},
                {"auditory", "talk through"},  {"kinesthetic", "act out"},
                {"intuitive", "grasp the gist of"}, {"analytical", "derive stepwise"}};
            const int m = 5 + static_cast<int>(fnv1a(question + "|" + style) % 3);
            auto flavor_it = kStyleFlavors.find(style);
            const char* flavor = flavor_it == kStyleFlavors.end() ? "review" : flavor_it->second;
            std::ostringstream out;
            for (int i = 0; i < m; ++i) {
                out << (i + 1) << ". " << flavor << " " << kThemes[i] << " " << question << "\n";
            }
            return out.str();
        }
        case TemplateId::answer: {
            const std::string ids = var_or(req, "context_ids", "");
            if (ids.empty()) {
                return "no-context: cannot ground an answer for " + question;
            }
            // Grounded answer: restate the question, then the lead of each of
            // the first few retrieved passages (context is newline-separated).
            // Source ids stay out of the graded prose.
            std::ostringstream out;
            out << "Answer to " << question;
            std::istringstream context(var_or(req, "context", ""));
            std::string passage;
            int used = 0;
            while (used < 4 && std::getline(context, passage)) {
                if (passage.empty()) continue;
                out << ' ' << first_words(passage, 26);
                ++used;
            }
            return out.str();
        }
        case TemplateId::judge:
            return std::to_string(
                overlap_score(var_or(req, "answer", ""), var_or(req, "reference", "")));
        case TemplateId::decompose: {
            std::ostringstream out;
            out << "1. What is the definition needed for " << question << "\n"
                << "2. Which rule or principle applies to " << question << "\n"
                << "3. How do the pieces combine to resolve " << question << "\n";
            return out.str();
        }
        case TemplateId::translate:
            return "Restated for retrieval: " + question;
        case TemplateId::hyde: {
            std::ostringstream out;
            out << "Hypothetical passage. " << question
                << " is resolved by stating the relevant definition, applying it directly, "
                << "and noting one worked example.";
            return out.str();
        }
    }
    throw FixtureMissError("no scripted response for template");
}

std::string MockGateway::chat(const ChatRequest& req) {
    if (auto hit = fixture_lookup(req)) return *hit;
    return scripted(req);
}

std::string render_prompt(const ChatRequest& req) {
    static const std::map<TemplateId, std::string> kPrompts = {
        {TemplateId::lecture,
         "You are a teacher. Deliver a lecture on {topic}. Follow these directives:\n"
         "{directives}"},
        {TemplateId::notes,
         "You are a student with learning style {learning_style} and personality "
         "{personality}. Take personal notes on this lecture:\n{lecture}"},
        {TemplateId::plan,
         "You are a student with learning style {learning_style}. Before answering, list "
         "the reasoning steps (numbered, 5 to 7) you would follow for: {question}"},
        {TemplateId::answer,
         "Answer the question using only the context.\nQuestion: {question}\nContext:\n"
         "{context}"},
        {TemplateId::judge,
         "Rate the answer against the reference on a 1-10 scale. Reply with the integer "
         "only.\nReference: {reference}\nAnswer: {answer}"},
        {TemplateId::decompose,
         "Split this question into simpler sub-questions, one per line: {question}"},
        {TemplateId::translate, "Reformulate this question for retrieval: {question}"},
        {TemplateId::hyde,
         "Write a short passage that would answer this question: {question}"},
    };
    std::string prompt = kPrompts.at(req.template_id);
    for (const auto& [k, v] : req.variables) {
        const std::string placeholder = "{" + k + "}";
        std::size_t pos = 0;
        while ((pos = prompt.find(placeholder, pos)) != std::string::npos) {
            prompt.replace(pos, placeholder.size(), v);
            pos += v.size();
        }
    }
    const auto open = prompt.find('{');
    if (open != std::string::npos && prompt.find('}', open) != std::string::npos) {
        throw ConfigError("unbound template placeholder in " +
                          std::string(template_name(req.template_id)) + " prompt");
    }
    return prompt;
}

// ---------------------------------------------------------------------------
// HTTP provider

struct HttpGateway::Impl {
    std::mutex mu;
    std::condition_variable cv;
    int inflight = 0;

    struct Slot {
        Impl& impl;
        explicit Slot(Impl& i, int cap) : impl(i) {
            std::unique_lock lock(impl.mu);
            impl.cv.wait(lock, [&] { return impl.inflight < cap; });
            ++impl.inflight;
        }
        ~Slot() {
            {
                std::lock_guard lock(impl.mu);
                --impl.inflight;
            }
            impl.cv.notify_one();
        }
    };
};

namespace {

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint must be a full URL: " + url);
    const auto path_begin = url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) return {url, "/"};
    return {url.substr(0, path_begin), url.substr(path_begin)};
}

json post_json(const std::string& endpoint, const std::string& api_key, const json& body,
               const RetryPolicy& retry) {
    const auto [base, path] = split_url(endpoint);
    int backoff = retry.backoff_ms;
    std::string last_error = "no attempts made";
    for (int attempt = 0; attempt < retry.max_attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
        httplib::Client client(base);
        client.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
        auto res = client.Post(path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            throw AuthError("authentication rejected (status " + std::to_string(res->status) +
                            ")");
        }
        if (res->status >= 500 || res->status == 429) {
            last_error = "server status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw TransportError("unexpected status " + std::to_string(res->status), false);
        }
        try {
            return json::parse(res->body);
        } catch (const json::parse_error& e) {
            throw TransportError(std::string("malformed provider response: ") + e.what(), false);
        }
    }
    throw TransportError(last_error + " after " + std::to_string(retry.max_attempts) +
                             " attempts",
                         true);
}

}  // namespace

HttpGateway::HttpGateway(ProviderConfig cfg) : cfg_(std::move(cfg)), impl_(new Impl) {
    cfg_.validate();
}

HttpGateway::~HttpGateway() = default;

std::string HttpGateway::chat(const ChatRequest& req) {
    const char* key = std::getenv(cfg_.auth_env.c_str());
    if (!key || !*key) throw AuthError("missing API key in $" + cfg_.auth_env);
    Impl::Slot slot(*impl_, cfg_.max_inflight);
    json body{{"model", cfg_.model},
              {"messages", json::array({{{"role", "user"}, {"content", render_prompt(req)}}})},
              {"temperature", req.sampling.temperature},
              {"max_tokens", req.sampling.max_tokens}};
    const json res = post_json(cfg_.endpoint, key, body, cfg_.retry);
    try {
        std::string text = res.at("choices").at(0).at("message").at("content").get<std::string>();
        if (text.empty()) throw TransportError("provider returned an empty completion", true);
        return text;
    } catch (const json::exception& e) {
        throw TransportError(std::string("unexpected completion shape: ") + e.what(), false);
    }
}

embed::Vector HttpGateway::embed_text(const std::string& text) {
    const char* key = std::getenv(cfg_.auth_env.c_str());
    if (!key || !*key) throw AuthError("missing API key in $" + cfg_.auth_env);
    if (cfg_.embed_endpoint.empty()) throw ConfigError("no embed endpoint configured");
    Impl::Slot slot(*impl_, cfg_.max_inflight);
    json body{{"model", cfg_.model}, {"input", json::array({text})}};
    const json res = post_json(cfg_.embed_endpoint, key, body, cfg_.retry);
    try {
        embed::Vector v = res.at("data").at(0).at("embedding").get<embed::Vector>();
        if (static_cast<int>(v.size()) != cfg_.embed_dimension) {
            throw ConfigError("embedding dimension mismatch: provider returned " +
                              std::to_string(v.size()) + ", configured " +
                              std::to_string(cfg_.embed_dimension));
        }
        embed::l2_normalize(v);
        return v;
    } catch (const json::exception& e) {
        throw TransportError(std::string("unexpected embedding shape: ") + e.what(), false);
    }
}

std::unique_ptr<Gateway> make_gateway(const ProviderConfig& cfg) {
    cfg.validate();
    if (cfg.kind == ProviderKind::scripted_mock) {
        if (!cfg.fixture_path.empty()) {
            return std::make_unique<MockGateway>(load_fixtures(cfg.fixture_path),
                                                 cfg.embed_dimension);
        }
        return std::make_unique<MockGateway>(cfg.embed_dimension);
    }
    return std::make_unique<HttpGateway>(cfg);
}

}  // namespace classim::llm
