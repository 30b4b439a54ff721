#pragma once

#include <string>

#include "relx/corpus.hpp"

namespace relx {

// CoNLL-U reader. Requires a "# sent_id = ..." comment per sentence; skips
// multiword-token ranges (1-2) and empty nodes (1.1). HEAD and the first
// four columns must be filled.
Corpus load_conllu(const std::string& path);

// Standoff entity file: one mention per line,
// "sid<TAB>start<TAB>end<TAB>etype[<TAB>cid]", token indices 1-based
// inclusive. '#' lines and blank lines are ignored. Unknown sids are an
// error.
void attach_entities(Corpus& c, const std::string& path);

// load_conllu + attach_entities + per-sentence validation.
Corpus convert_corpus(const std::string& conllu_path,
                      const std::string& entities_path);

}  // namespace relx
