/* Copyright 2026 The Lemma Namer Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Shared fixtures: the mg_eq_proof lemma in its three serialized views and
// a k-tree fragment before and after trimming. Elided parts of the original
// listings are filled with concrete subtrees.

#ifndef LEMMA_NAMER_TESTS_FIXTURES_H_
#define LEMMA_NAMER_TESTS_FIXTURES_H_

#include <string>

#include "lemma_namer/corpus.h"
#include "lemma_namer/sexp.h"

namespace lemma_namer::testing {

inline constexpr const char* kMgTokens =
    R"sx((Sentence((IDENT Lemma)(IDENT mg_eq_proof)(IDENT L1)(IDENT L2)
  (KEYWORD"(")(IDENT N1)(KEYWORD :)(IDENT mgClassifier)
  (IDENT L1)(KEYWORD")")(KEYWORD :)(IDENT L1)(KEYWORD =i)(IDENT L2)
  (KEYWORD ->)(IDENT nerode)(IDENT L2)(IDENT N1)(KEYWORD .))))sx";

inline constexpr const char* kMgSTree =
    R"sx((VernacExpr()(VernacStartTheoremProof Lemma (Id mg_eq_proof)
 (((CLocalAssum(Name(Id L1))(CHole()IntroAnonymous()))
   (CLocalAssum(Name(Id L2))(CHole()IntroAnonymous()))
   (CLocalAssum(Name(Id N1))
    (CApp(CRef(Ser_Qualid(DirPath())(Id mgClassifier)))(CRef(Ser_Qualid(DirPath())(Id L1))))))
  (CNotation(InConstrEntrySomeLevel"_ -> _")
   (CNotation(InConstrEntrySomeLevel"_ =i _")
    (CRef(Ser_Qualid(DirPath())(Id L1)))(CRef(Ser_Qualid(DirPath())(Id L2))))
   (CApp(CRef(Ser_Qualid(DirPath())(Id nerode)))
    (CRef(Ser_Qualid(DirPath())(Id L2)))(CRef(Ser_Qualid(DirPath())(Id N1)))))))))sx";

inline constexpr const char* kMgKTree =
    R"sx((Prod (Name (Id char)) (Sort Set)
 (Prod (Name (Id L1)) (App (Ref (DirPath ((Id ssrbool) (Id ssr) (Id Coq))) (Id pred)) (Var (Id char)))
  (Prod (Name (Id L2)) (App (Ref (DirPath ((Id ssrbool) (Id ssr) (Id Coq))) (Id pred)) (Var (Id char)))
   (Prod (Name (Id N1)) (App (Ref (DirPath ((Id myhill_nerode) (Id RegLang))) (Id mgClassifier)) (Var (Id L1)))
    (Prod Anonymous (App (Ref (DirPath ((Id ssrbool) (Id ssr) (Id Coq))) (Id eq_mem))
      (Var (Id char)) (Var (Id L1)) (Var (Id L2)))
     (App (Ref (DirPath ((Id myhill_nerode) (Id RegLang))) (Id nerode))
      (Var (Id char)) (Var (Id L2)) (Var (Id N1)))))))))sx";

// The trimming example with `...` instantiated identically on both sides.
inline constexpr const char* kTrimUpper =
    "(Prod Anonymous (App (Ref (DirPath ((Id ssrbool) (Id ssr) (Id Coq))) "
    "(Id eq_mem)) (Var (Id L1)) ((App (Ref (Const nerode) (Univ 0)))) "
    "(Var (Id L2))))";
inline constexpr const char* kTrimLower =
    "(Prod Anonymous (App eq_mem (Var (Id L1)) (App (Ref (Const nerode) "
    "(Univ 0))) (Var (Id L2))))";

inline LemmaRecord mg_eq_proof_record() {
  LemmaRecord r;
  r.doc_id = "RegLang.myhill_nerode";
  r.name = "mg_eq_proof";
  r.qualified_name = "RegLang.myhill_nerode.mg_eq_proof";
  r.stmt_tokens = parse_sentence_tokens(parse_sexp(kMgTokens));
  r.stree = parse_sexp(kMgSTree);
  r.ktree = parse_sexp(kMgKTree);
  return r;
}

}  // namespace lemma_namer::testing

#endif  // LEMMA_NAMER_TESTS_FIXTURES_H_
