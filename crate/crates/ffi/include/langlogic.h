#ifndef LANGLOGIC_H
#define LANGLOGIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum LnlStatus {
  LNL_STATUS_OK = 0,
  // The language definition has validation findings.
  LNL_STATUS_VALIDATION = 1,
  // Malformed language text, assertion or derivation JSON.
  LNL_STATUS_PARSE = 2,
  // The goal is not derivable; the output holds the failure report.
  LNL_STATUS_NO_PROOF = 3,
  LNL_STATUS_NULL_ARGUMENT = 4,
  LNL_STATUS_INVALID_UTF8 = 5,
  // An option is out of range or names an unknown metavariable.
  LNL_STATUS_INVALID_ARGUMENT = 6,
  // A panic was caught at the boundary.
  LNL_STATUS_INTERNAL = 7,
} LnlStatus;

// A parsed language definition.
typedef struct LnlLanguage LnlLanguage;

// Prover options. A null pointer means defaults.
typedef struct LnlOptions {
  // Maximum passes over the inference rules; 0 means the default bound.
  uint32_t max_passes;
  // Comma-separated metavariables replacing the file's `%ineffectual`
  // directive, or null to keep it.
  const char *ineffectual;
} LnlOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a `.lan` document. Validation is deferred to
// [`lnl_language_validate`]; analyses refuse invalid languages.
//
// # Safety
// `source` must be null or a NUL-terminated string; `out` must be null or
// writable.
enum LnlStatus lnl_language_parse(const char *source, struct LnlLanguage **out);

// Releases a language handle. Null is ignored.
//
// # Safety
// `lang` must be null or a handle from [`lnl_language_parse`] that has not
// been freed.
void lnl_language_free(struct LnlLanguage *lang);

// Writes `{"valid": bool, "findings": [string]}` to `out`. Returns
// `Validation` when there are findings.
//
// # Safety
// `lang` must be a live handle; `out` must be writable.
enum LnlStatus lnl_language_validate(const struct LnlLanguage *lang, char **out);

// Writes the language back out in `.lan` syntax.
//
// # Safety
// `lang` must be a live handle; `out` must be writable.
enum LnlStatus lnl_language_render(const struct LnlLanguage *lang, char **out);

// Saturates from `pre` (null means `true`) and writes `{"atoms": [...]}`.
//
// # Safety
// `lang` must be a live handle; `pre` null or a NUL-terminated string;
// `opts` null or valid; `out` writable.
enum LnlStatus lnl_derive(const struct LnlLanguage *lang,
                          const char *pre,
                          const struct LnlOptions *opts,
                          char **out);

// Proves `goal` from `pre` (null means `true`). Writes the derivation tree
// as JSON and returns `Ok`, or writes the failure report and returns
// `NoProof`.
//
// # Safety
// As for [`lnl_derive`]; `goal` must be a NUL-terminated string.
enum LnlStatus lnl_prove(const struct LnlLanguage *lang,
                         const char *pre,
                         const char *goal,
                         const struct LnlOptions *opts,
                         char **out);

// Checks a derivation tree given as JSON. `valid` receives 1 when the tree
// is a correct derivation about `lang`, else 0; the reason for rejection is
// available from [`lnl_last_error`].
//
// # Safety
// `lang` must be a live handle; `tree_json` a NUL-terminated string;
// `valid` writable.
enum LnlStatus lnl_check_derivation(const struct LnlLanguage *lang,
                                    const char *tree_json,
                                    int32_t *valid);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library that has not been freed.
void lnl_string_free(char *s);

// Description of the last failure on this thread, or null after a
// successful call. Valid until the next call into the library on this
// thread.
const char *lnl_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LANGLOGIC_H */
