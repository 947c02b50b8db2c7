#pragma once

#include <string>
#include <vector>

namespace grc {

/// Built-in vocabulary shared by the synthetic corpus renderer and the
/// scripted backend's substitution model. Lowercase, lengths 3 to 8.
inline const std::vector<std::string>& builtin_words() {
    static const std::vector<std::string> words = {
        "ace",     "air",     "arm",     "art",      "bag",      "bar",
        "bed",     "box",     "bus",     "cab",      "car",      "cat",
        "cup",     "dog",     "ear",     "egg",      "end",      "eye",
        "fan",     "fog",     "gas",     "hat",      "ice",      "ink",
        "jam",     "key",     "law",     "map",      "net",      "oak",
        "pen",     "rat",     "sea",     "sun",      "tax",      "van",
        "war",     "zoo",     "bank",    "bell",     "bird",     "blue",
        "boat",    "book",    "cafe",    "cake",     "city",     "coin",
        "corn",    "dark",    "desk",    "door",     "east",     "exit",
        "fire",    "fish",    "game",    "gate",     "gold",     "hall",
        "hand",    "iron",    "king",    "lake",     "lamp",     "line",
        "lion",    "maze",    "milk",    "moon",     "park",     "rain",
        "ring",    "road",    "rock",    "roof",     "room",     "sale",
        "ship",    "shop",    "sign",    "snow",     "star",     "stop",
        "taxi",    "time",    "tree",    "wall",     "west",     "wind",
        "wolf",    "apple",   "beach",   "brick",    "chair",    "clock",
        "cloud",   "coast",   "dance",   "eagle",    "earth",    "ferry",
        "field",   "glass",   "grape",   "green",    "horse",    "hotel",
        "house",   "light",   "metal",   "music",    "north",    "ocean",
        "paper",   "phone",   "plant",   "power",    "radio",    "river",
        "salad",   "sound",   "south",   "steel",    "stone",    "store",
        "table",   "tiger",   "tower",   "train",    "water",    "wheel",
        "bridge",  "candle",  "castle",  "cherry",   "circle",   "coffee",
        "copper",  "corner",  "dragon",  "flower",   "forest",   "garden",
        "guitar",  "harbor",  "island",  "jungle",   "kitten",   "ladder",
        "lemon",   "market",  "mirror",  "office",   "orange",   "pillow",
        "planet",  "rocket",  "school",  "shadow",   "silver",   "spring",
        "street",  "summer",  "sunset",  "temple",   "ticket",   "tunnel",
        "valley",  "window",  "winter",  "airport",  "balcony",  "bicycle",
        "cabinet", "captain", "channel", "chicken",  "country",  "diamond",
        "factory", "gallery", "harvest", "highway",  "journey",  "kitchen",
        "lantern", "library", "machine", "monster",  "morning",  "mountain",
        "network", "organ",   "pattern", "penguin",  "picture",  "rainbow",
        "station", "theater", "village", "volcano",  "weather",  "building",
        "campaign", "computer", "daughter", "elephant", "festival", "hospital",
        "keyboard", "lighting", "magazine", "merchant", "notebook", "painting",
        "platform", "question", "sandwich", "shoulder", "terminal", "umbrella",
    };
    return words;
}

}  // namespace grc
