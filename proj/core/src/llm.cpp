#include "hope/llm.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <utility>

namespace hope::llm {

namespace {

std::string trim(std::string_view text) {
    std::size_t begin = 0, end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return std::string(text.substr(begin, end - begin));
}

std::set<std::string> token_set(std::string_view text) {
    std::set<std::string> tokens;
    std::string token;
    auto flush = [&] {
        if (!token.empty()) tokens.insert(std::exchange(token, {}));
    };
    for (char c : text) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            token += c;
        } else if (c >= 'A' && c <= 'Z') {
            token += static_cast<char>(c - 'A' + 'a');
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::size_t overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
    std::size_t shared = 0;
    for (const auto& token : a) shared += b.count(token);
    return shared;
}

const std::string& part(const GenerationRequest& request, std::string_view name) {
    for (const auto& [key, value] : request.prompt_parts) {
        if (key == name) return value;
    }
    throw usage_error("request is missing prompt part '" + std::string(name) + "'");
}

std::vector<std::string> sentences_of(std::string_view text) {
    auto spans = corpus::split_sentences(text);
    std::vector<std::string> out;
    out.reserve(spans.size());
    for (const auto& span : spans) {
        out.emplace_back(text.substr(span.begin, span.end - span.begin));
    }
    if (out.empty() && !text.empty()) out.emplace_back(trim(text));
    return out;
}

// Sentence with the largest token overlap against the question; earliest
// wins ties, and zero overlap falls back to the first sentence.
std::pair<std::string, std::size_t> best_sentence(std::string_view text,
                                                  const std::set<std::string>& question_tokens) {
    auto sentences = sentences_of(text);
    if (sentences.empty()) return {"", 0};
    std::size_t best_index = 0, best_score = 0;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        std::size_t score = overlap(token_set(sentences[i]), question_tokens);
        if (score > best_score) {
            best_score = score;
            best_index = i;
        }
    }
    return {sentences[best_index], best_score};
}

std::string increment_first_number(const std::string& text) {
    std::size_t begin = text.find_first_of("0123456789");
    if (begin == std::string::npos) return text;
    std::size_t end = begin;
    while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
    unsigned long long value = std::stoull(text.substr(begin, end - begin));
    return text.substr(0, begin) + std::to_string(value + 1) + text.substr(end);
}

std::string swap_first_two_words(const std::string& text) {
    std::istringstream stream(text);
    std::vector<std::string> words;
    std::string word;
    while (stream >> word) words.push_back(word);
    if (words.size() < 2 || words[0] == words[1]) return text;
    std::swap(words[0], words[1]);
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += ' ';
        out += words[i];
    }
    return out;
}

std::string join_options(const std::array<std::string, 4>& options) {
    std::string out;
    for (std::size_t i = 0; i < options.size(); ++i) {
        out += static_cast<char>('A' + i);
        out += ". ";
        out += options[i];
        if (i + 1 < options.size()) out += '\n';
    }
    return out;
}

std::string join_context(const std::vector<const chunkers::Passage*>& context) {
    std::string out;
    for (std::size_t i = 0; i < context.size(); ++i) {
        if (i) out += "\n\n";
        out += context[i]->text;
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Parsers
// ---------------------------------------------------------------------------

std::vector<std::string> parse_numbered_list(std::string_view response) {
    std::vector<std::string> items;
    std::size_t cursor = 0;
    while (cursor <= response.size()) {
        std::size_t eol = response.find('\n', cursor);
        std::string_view line = response.substr(
            cursor, eol == std::string_view::npos ? std::string_view::npos : eol - cursor);

        std::string text = trim(line);
        // strip "12." / "12)" / "12:" numbering or a "-" / "*" bullet
        std::size_t at = 0;
        while (at < text.size() && std::isdigit(static_cast<unsigned char>(text[at]))) ++at;
        if (at > 0 && at < text.size() && (text[at] == '.' || text[at] == ')' || text[at] == ':')) {
            text = trim(std::string_view(text).substr(at + 1));
        } else if (!text.empty() && (text[0] == '-' || text[0] == '*')) {
            text = trim(std::string_view(text).substr(1));
        }
        // keep only lines that say something: at least one alphanumeric char
        bool has_content = std::any_of(text.begin(), text.end(), [](unsigned char c) {
            return std::isalnum(c);
        });
        if (has_content) items.push_back(std::move(text));

        if (eol == std::string_view::npos) break;
        cursor = eol + 1;
    }
    return items;
}

std::optional<Quadruple> parse_quadruple(std::string_view response, std::string segment_id) {
    static constexpr std::array<std::string_view, 4> kLabels = {"TRUE:", "FALSE1:", "FALSE2:",
                                                                "FALSE3:"};
    std::array<std::size_t, 4> starts{};
    for (std::size_t i = 0; i < kLabels.size(); ++i) {
        std::size_t at = response.find(kLabels[i]);
        if (at == std::string_view::npos) return std::nullopt;
        starts[i] = at;
    }

    auto section = [&](std::size_t i) {
        std::size_t begin = starts[i] + kLabels[i].size();
        std::size_t end = response.size();
        for (std::size_t j = 0; j < kLabels.size(); ++j) {
            if (starts[j] > starts[i]) end = std::min(end, starts[j]);
        }
        return trim(response.substr(begin, end - begin));
    };

    Quadruple quadruple;
    quadruple.segment_id = std::move(segment_id);
    quadruple.true_statement = section(0);
    for (std::size_t i = 0; i < 3; ++i) quadruple.false_statements[i] = section(i + 1);

    std::array<std::string_view, 4> all = {quadruple.true_statement, quadruple.false_statements[0],
                                           quadruple.false_statements[1],
                                           quadruple.false_statements[2]};
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i].empty()) return std::nullopt;
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            if (all[i] == all[j]) return std::nullopt;
        }
    }
    return quadruple;
}

std::optional<int> parse_option_letter(std::string_view response) {
    for (std::size_t i = 0; i < response.size(); ++i) {
        char c = response[i];
        char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (upper < 'A' || upper > 'D') continue;
        bool alpha_before = i > 0 && std::isalpha(static_cast<unsigned char>(response[i - 1]));
        bool alpha_after =
            i + 1 < response.size() && std::isalpha(static_cast<unsigned char>(response[i + 1]));
        if (!alpha_before && !alpha_after) return upper - 'A';
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Prompt task operations
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> generate_list(LlmProvider& llm, Task task,
                                       const chunkers::Passage& passage, std::size_t n,
                                       double temperature) {
    if (n < 2) throw usage_error("statement/question count must be >= 2");
    if (!(temperature > 0.0))
        throw usage_error("statement/question generation requires temperature > 0");

    GenerationRequest request;
    request.task = task;
    request.prompt_parts = {{"passage", passage.text}, {"count", std::to_string(n)}};
    request.temperature = temperature;

    std::vector<std::string> items = parse_numbered_list(llm.generate(request));
    if (items.size() < n) {
        // one regeneration pass tops up short or unparseable output
        request.sample_index = 1;
        auto more = parse_numbered_list(llm.generate(request));
        items.insert(items.end(), more.begin(), more.end());
    }
    if (items.size() > n) items.resize(n);
    if (items.size() < 2) {
        throw provider_error("passage '" + passage.id + "': provider returned " +
                             std::to_string(items.size()) + " parseable items after retry");
    }
    return items;
}

} // namespace

std::vector<std::string> generate_statements(LlmProvider& llm, const chunkers::Passage& passage,
                                             std::size_t n, double temperature) {
    return generate_list(llm, Task::Statements, passage, n, temperature);
}

std::vector<std::string> generate_questions(LlmProvider& llm, const chunkers::Passage& passage,
                                            std::size_t n, double temperature) {
    return generate_list(llm, Task::Questions, passage, n, temperature);
}

std::string answer_closed(LlmProvider& llm, std::string_view question,
                          const chunkers::Passage& focus) {
    if (question.empty()) throw usage_error("answer_closed: empty question");
    GenerationRequest request;
    request.task = Task::AnswerClosed;
    request.prompt_parts = {{"question", std::string(question)}, {"passage", focus.text}};
    request.temperature = 0.0;
    return trim(llm.generate(request));
}

std::string answer_rag(LlmProvider& llm, std::string_view question,
                       const chunkers::Passage& focus,
                       const std::vector<const chunkers::Passage*>& context) {
    if (question.empty()) throw usage_error("answer_rag: empty question");
    GenerationRequest request;
    request.task = Task::AnswerRag;
    request.prompt_parts = {{"question", std::string(question)},
                            {"passage", focus.text},
                            {"context", join_context(context)}};
    request.temperature = 0.0;
    return trim(llm.generate(request));
}

std::optional<Quadruple> generate_quadruple(LlmProvider& llm, const corpus::Segment& segment,
                                            double temperature, WarningLog* warnings) {
    if (segment.text.empty()) throw usage_error("generate_quadruple: empty segment");
    if (!(temperature > 0.0))
        throw usage_error("quadruple generation requires temperature > 0");

    GenerationRequest request;
    request.task = Task::Quadruple;
    request.prompt_parts = {{"segment", segment.text}};
    request.temperature = temperature;

    for (int attempt = 0; attempt < 2; ++attempt) {
        request.sample_index = attempt;
        if (auto quadruple = parse_quadruple(llm.generate(request), segment.id())) {
            return quadruple;
        }
    }
    if (warnings) {
        warnings->push_back({"segment_skipped", segment.document_id, "",
                             "segment " + segment.id() + ": unparseable quadruple after retry"});
    }
    return std::nullopt;
}

DiscriminationResult discriminate(LlmProvider& llm, const std::array<std::string, 4>& options,
                                  const std::vector<const chunkers::Passage*>& context) {
    GenerationRequest request;
    request.task = Task::Discriminate;
    request.prompt_parts = {{"context", join_context(context)},
                            {"options", join_options(options)}};
    request.temperature = 0.0;

    for (int attempt = 0; attempt < 2; ++attempt) {
        request.sample_index = attempt;
        if (auto choice = parse_option_letter(llm.generate(request))) {
            return {choice, attempt > 0};
        }
    }
    return {std::nullopt, true};
}

// ---------------------------------------------------------------------------
// Mock provider
// ---------------------------------------------------------------------------

std::string MockLlmProvider::generate(const GenerationRequest& request) {
    calls_.fetch_add(1);
    switch (request.task) {
        case Task::Statements:
        case Task::Questions: {
            const auto& passage = part(request, "passage");
            std::size_t n = std::stoul(part(request, "count"));
            auto sentences = sentences_of(passage);
            std::string out;
            for (std::size_t i = 0; i < n; ++i) {
                const std::string& sentence = sentences[i % sentences.size()];
                out += std::to_string(i + 1) + ". ";
                if (request.task == Task::Questions) {
                    out += "According to the document, is it true that: " + sentence + "?";
                } else {
                    out += sentence;
                }
                out += '\n';
            }
            return out;
        }
        case Task::AnswerClosed: {
            auto question_tokens = token_set(part(request, "question"));
            return best_sentence(part(request, "passage"), question_tokens).first;
        }
        case Task::AnswerRag: {
            auto question_tokens = token_set(part(request, "question"));
            auto [focus_answer, focus_score] =
                best_sentence(part(request, "passage"), question_tokens);
            const auto& context = part(request, "context");
            if (!context.empty()) {
                auto [context_answer, context_score] = best_sentence(context, question_tokens);
                if (context_score > focus_score) return context_answer;
            }
            return focus_answer;
        }
        case Task::Quadruple: {
            auto sentences = sentences_of(part(request, "segment"));
            const std::string& middle = sentences[sentences.size() / 2];
            std::string f1 = "It is not the case that " + middle;
            std::string f2 = increment_first_number(middle);
            if (f2 == middle) f2 = "Reportedly, it is false that " + middle;
            std::string f3 = swap_first_two_words(middle);
            if (f3 == middle) f3 = "In contrast, " + middle;
            return "TRUE: " + middle + "\nFALSE1: " + f1 + "\nFALSE2: " + f2 +
                   "\nFALSE3: " + f3 + "\n";
        }
        case Task::Discriminate: {
            const auto& context = part(request, "context");
            auto context_tokens = token_set(context);
            auto lines = parse_numbered_list(part(request, "options"));
            // the options part is always "A. ..." .. "D. ..."; recover texts
            std::array<std::string, 4> options;
            std::size_t count = std::min<std::size_t>(4, lines.size());
            for (std::size_t i = 0; i < count; ++i) {
                std::string_view line = lines[i];
                if (line.size() > 2 && line[1] == '.' ) line = line.substr(2);
                options[i] = trim(line);
            }

            int best = 0;
            double best_score = -1.0;
            for (std::size_t i = 0; i < count; ++i) {
                double score;
                if (!options[i].empty() && context.find(options[i]) != std::string::npos) {
                    score = 2.0; // verbatim match dominates any token fraction
                } else {
                    auto tokens = token_set(options[i]);
                    score = tokens.empty() ? 0.0
                                           : static_cast<double>(overlap(tokens, context_tokens)) /
                                                 static_cast<double>(tokens.size());
                }
                if (score > best_score) {
                    best_score = score;
                    best = static_cast<int>(i);
                }
            }
            return std::string(1, static_cast<char>('A' + best));
        }
    }
    throw usage_error("unknown generation task");
}

} // namespace hope::llm
