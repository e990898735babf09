#include "hope/prompts.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "hope/errors.hpp"

namespace hope::llm {

namespace {

constexpr std::string_view kStatementsTemplate =
    R"(Read the passage and write {count} standalone declarative statements, each expressing one fact from the passage. Number them "1." through "{count}". Do not add facts that are not in the passage.

Example passage: "Oak trees grow slowly. Their wood is dense."
Example output:
1. Oak trees grow slowly.
2. The wood of oak trees is dense.

Passage:
{passage}
)";

constexpr std::string_view kQuestionsTemplate =
    R"(Read the passage and write {count} questions that can be answered using only the passage. Number them "1." through "{count}".

Example passage: "Oak trees grow slowly."
Example output:
1. How quickly do oak trees grow?

Passage:
{passage}
)";

constexpr std::string_view kAnswerClosedTemplate =
    R"(Answer the question using only the passage below. Reply with the answer text only.

Example question: "How quickly do oak trees grow?"
Example passage: "Oak trees grow slowly."
Example answer: Oak trees grow slowly.

Question: {question}

Passage:
{passage}
)";

constexpr std::string_view kAnswerRagTemplate =
    R"(Answer the question using the focus passage and, when relevant, the additional context passages. Reply with the answer text only.

Example question: "How quickly do oak trees grow?"
Example focus passage: "Oak trees grow slowly."
Example answer: Oak trees grow slowly.

Question: {question}

Focus passage:
{passage}

Context passages:
{context}
)";

constexpr std::string_view kQuadrupleTemplate =
    R"(Read the text segment. Write one statement that is verifiably true from the segment and three statements that are plausible but false. Label them exactly TRUE:, FALSE1:, FALSE2:, FALSE3:.

Example segment: "The tower is 310 meters tall."
Example output:
TRUE: The tower is 310 meters tall.
FALSE1: The tower is 410 meters tall.
FALSE2: The tower is under 100 meters tall.
FALSE3: The tower's height was never measured.

Segment:
{segment}
)";

constexpr std::string_view kDiscriminateTemplate =
    R"(Exactly one of the four statements below is supported by the context. Reply with the single letter A, B, C, or D, even if you are unsure.

Example context: "The tower is 310 meters tall."
Example statements:
A. The tower is 410 meters tall.
B. The tower is 310 meters tall.
C. The tower is short.
D. The tower fell down.
Example answer: B

Context:
{context}

Statements:
{options}
)";

struct TaskSpec {
    Task task;
    std::string_view name;
    std::string_view default_template;
    std::vector<std::string_view> required_placeholders;
};

const std::vector<TaskSpec>& task_specs() {
    static const std::vector<TaskSpec> specs = {
        {Task::Statements, "statements", kStatementsTemplate, {"{passage}", "{count}"}},
        {Task::Questions, "questions", kQuestionsTemplate, {"{passage}", "{count}"}},
        {Task::AnswerClosed, "answer_closed", kAnswerClosedTemplate, {"{question}", "{passage}"}},
        {Task::AnswerRag, "answer_rag", kAnswerRagTemplate,
         {"{question}", "{passage}", "{context}"}},
        {Task::Quadruple, "quadruple", kQuadrupleTemplate, {"{segment}"}},
        {Task::Discriminate, "discriminate", kDiscriminateTemplate, {"{options}", "{context}"}},
    };
    return specs;
}

const TaskSpec& spec_for(Task task) {
    for (const auto& spec : task_specs()) {
        if (spec.task == task) return spec;
    }
    throw usage_error("unknown prompt task");
}

} // namespace

std::string_view task_name(Task task) {
    return spec_for(task).name;
}

PromptLibrary PromptLibrary::defaults() {
    PromptLibrary library;
    for (const auto& spec : task_specs()) {
        library.templates_[spec.task] = std::string(spec.default_template);
    }
    return library;
}

void PromptLibrary::load_overrides(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw io_error("prompt directory does not exist: " + dir.string());
    }
    for (const auto& spec : task_specs()) {
        auto file = dir / (std::string(spec.name) + ".txt");
        if (!std::filesystem::exists(file)) continue;
        std::ifstream in(file, std::ios::binary);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        std::string text = std::move(buffer).str();
        for (std::string_view placeholder : spec.required_placeholders) {
            if (text.find(placeholder) == std::string::npos) {
                throw usage_error("prompt template " + file.string() + " is missing mandatory " +
                                  std::string(placeholder));
            }
        }
        templates_[spec.task] = std::move(text);
    }
}

const std::string& PromptLibrary::template_for(Task task) const {
    auto it = templates_.find(task);
    if (it == templates_.end()) throw usage_error("no template loaded for task");
    return it->second;
}

std::string PromptLibrary::render(
    Task task, const std::vector<std::pair<std::string, std::string>>& parts) const {
    std::string result = template_for(task);
    for (const auto& [name, value] : parts) {
        const std::string placeholder = "{" + name + "}";
        std::size_t at = 0;
        while ((at = result.find(placeholder, at)) != std::string::npos) {
            result.replace(at, placeholder.size(), value);
            at += value.size();
        }
    }
    return result;
}

} // namespace hope::llm
