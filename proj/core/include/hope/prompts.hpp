#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hope::llm {

enum class Task { Statements, Questions, AnswerClosed, AnswerRag, Quadruple, Discriminate };

std::string_view task_name(Task task);

/// Editable prompt templates, one per task. Defaults are compiled in; a
/// directory of <task>.txt files can override them. Each template must keep
/// its mandatory placeholders ({passage}, {question}, {segment}, {context},
/// {options}, {count}) or loading fails.
class PromptLibrary {
public:
    static PromptLibrary defaults();

    /// Overrides templates from <dir>/<task>.txt where present.
    void load_overrides(const std::filesystem::path& dir);

    const std::string& template_for(Task task) const;

    /// Fills {name} placeholders from the named parts. Unknown placeholders
    /// are left verbatim.
    std::string render(Task task,
                       const std::vector<std::pair<std::string, std::string>>& parts) const;

private:
    std::map<Task, std::string> templates_;
};

} // namespace hope::llm
