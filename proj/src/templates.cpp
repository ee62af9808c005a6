#include "guiflow/subtask.hpp"

namespace guiflow {

// The stock instruction templates for page-reaching tasks. Treat as data:
// wording, punctuation, and the one duplicate line are intentional.
const std::vector<std::string>& default_reach_templates() {
  static const std::vector<std::string> templates = {
      "Navigate to {text} page.",
      "Go to {text} page.",
      "From the current page, what interactions should be performed to reach "
      "{text} page?",
      "What actions need to be performed to reach {text} image?",
      "Determine the actions that need to be taken to display {text} page.",
      "Visit the {text} page.",
      "What actions should you take to advance to the page showing {text}?",
      "I want to go to {text} interface.",
      "What actions will take you to {text} image?",
      "Describe the steps that need to be taken on the current image to find "
      "{text} image.",
      "Is the page showing {text}?",
      "First, find {text} page.",
      "Help me find the page with {text}.",
      "Perform a series of actions to reach {text}.",
      "First visit {text} page.",
      "What actions do I need to take to find {text} page?",
      "How do I get to {text} page?",
      "Help me navigate to {text} interface.",
      "Go to {text} interface.",
      "Jump to {text} page.",
      "Next, enter {text} page.",
      "Visit the page showing {text}?",
      "Find the image with {text}?",
      "How to get to the page with {text}?",
      "I want to go to {text} page.",
      "Open {text} image?",
      "Next, go to {text} page.",
      "Need to visit {text}.",
      "Enter {text} page.",
      "Navigate to {text}.",
      "How to get to the page with {text}?",
      "Guide to the image with {text}.",
  };
  return templates;
}

}  // namespace guiflow
