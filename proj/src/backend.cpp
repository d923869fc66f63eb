#include "tir/backend.hpp"

#include "tir/error.hpp"

namespace tir {

void GenerationParams::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw PreconditionError("temperature must be in [0, 2], got " + std::to_string(temperature));
  }
  if (max_tokens < 1) throw PreconditionError("max_tokens must be positive");
}

std::string ChatBackend::chat(std::span<const ChatMessage> messages, const GenerationParams& params) {
  if (messages.empty()) throw PreconditionError("chat requires at least one message");
  const Role last = messages.back().role;
  if (last != Role::user && last != Role::tool) {
    throw PreconditionError("last message must come from the user or a tool, got " + std::string(to_string(last)));
  }
  params.validate();
  return complete(messages, params);
}

}  // namespace tir
