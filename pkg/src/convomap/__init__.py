"""convomap: conversation history analysis, layout, and context assembly."""

from .model import Conversation, ConversationNode, EmbeddingVector, Topic, validate_conversation

__version__ = "0.1.0"

__all__ = [
    "Conversation",
    "ConversationNode",
    "EmbeddingVector",
    "Topic",
    "validate_conversation",
    "__version__",
]
