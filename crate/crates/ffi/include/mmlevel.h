#ifndef MMLEVEL_H
#define MMLEVEL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes returned by fallible calls.
typedef enum MmStatus {
  MM_STATUS_OK = 0,
  // A required pointer argument was null.
  MM_STATUS_NULL_ARGUMENT = 1,
  // An argument was malformed (bad UTF-8, unknown approach, zero rooms).
  MM_STATUS_INVALID_ARGUMENT = 2,
  // Level data could not be read or parsed.
  MM_STATUS_DATA_ERROR = 3,
  // Training or generation failed.
  MM_STATUS_MODEL_ERROR = 4,
  // A panic was caught at the boundary.
  MM_STATUS_INTERNAL = 5,
} MmStatus;

// A loaded corpus of annotated levels.
typedef struct MmCorpus MmCorpus;

// A trained generator for one approach.
typedef struct MmGenerator MmGenerator;

// One generated level.
typedef struct MmLevel MmLevel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The caller
// owns the returned string.
char *mm_last_error(void);

// Release a string returned by this library. Null is ignored.
void mm_string_free(char *s);

// Library version, as a static NUL-terminated string.
const char *mm_version(void);

// Load every level with a path sidecar from `dir`.
enum MmStatus mm_corpus_load(const char *dir, struct MmCorpus **out);

void mm_corpus_free(struct MmCorpus *corpus);

// Number of levels in the corpus; 0 for null.
uintptr_t mm_corpus_level_count(const struct MmCorpus *corpus);

// Train `approach` ("ensemble", "simplified" or "hierarchical") on the
// corpus, leaving out `withheld` when it is not null.
enum MmStatus mm_generator_train(const struct MmCorpus *corpus,
                                 const char *approach,
                                 const char *withheld,
                                 struct MmGenerator **out);

void mm_generator_free(struct MmGenerator *generator);

// Generate one level of `rooms` rooms from `seed`.
enum MmStatus mm_generator_generate(const struct MmGenerator *generator,
                                    uint64_t seed,
                                    uintptr_t rooms,
                                    uint32_t resample_cap,
                                    struct MmLevel **out);

void mm_level_free(struct MmLevel *level);

// The level as text, one row per line, top row first. Null on a null level.
char *mm_level_text(const struct MmLevel *level);

// Width and height in tiles.
enum MmStatus mm_level_size(const struct MmLevel *level, uintptr_t *width, uintptr_t *height);

// Seam resamples spent building the level.
uint32_t mm_level_resample_count(const struct MmLevel *level);

// Whether the agent can cross the level with the given jump budget.
enum MmStatus mm_level_is_playable(const struct MmLevel *level,
                                   uint8_t max_rise,
                                   uint8_t max_horizontal,
                                   bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MMLEVEL_H */
