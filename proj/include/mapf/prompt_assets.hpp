#pragma once

// Prompt templates embedded at build time from assets/prompts/*.txt.

namespace mapf::assets {

extern const char* const kSystemPromptSbs;
extern const char* const kSystemPromptOs;

}  // namespace mapf::assets
