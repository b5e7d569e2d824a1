#pragma once

#include <string_view>

// Text resources compiled into the library from resources/.
namespace violet::resources {

std::string_view stopwords();
std::string_view lemma_exceptions();
std::string_view keyword_catalog();

}  // namespace violet::resources
