#ifndef LTLFMUC_H
#define LTLFMUC_H

/* C interface to the minimal-unsatisfiable-core enumerator.
 *
 * A specification is a conjunction of LTL over finite traces formulas.
 * Enumeration streams events through a callback; every emitted core is
 * already certified minimal unsatisfiable at the moment the callback runs,
 * regardless of whether the run later times out.
 *
 * Pointers handed to a callback are valid only for the duration of that
 * callback.  Strings returned as char* are heap copies; release them with
 * muc_string_free.  All functions taking a muc_spec* may be called from any
 * thread, but a single spec must not be used concurrently.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef MUC_API
#define MUC_API __attribute__((visibility("default")))
#endif

typedef struct muc_spec muc_spec;

typedef enum muc_status {
    MUC_OK = 0,
    MUC_ERR_PARSE = 1,    /* input rejected; muc_last_error has the position */
    MUC_ERR_INVALID = 2,  /* bad argument (null pointer, zero depth, ...) */
    MUC_ERR_TIMEOUT = 3,  /* wall clock expired; partial output is valid */
    MUC_ERR_RESOURCE = 4, /* a solver budget or the depth cap was exceeded */
    MUC_ERR_CALLBACK = 5, /* the event callback asked to stop */
} muc_status;

typedef struct muc_options {
    uint64_t max_k;   /* 0: deepen up to the completeness threshold */
    double timeout_s; /* 0: no wall-clock limit */
    int deterministic; /* nonzero: single-threaded candidate generation */
    int verify;        /* nonzero: recheck minimality of every emission */
    uint64_t var_budget;   /* probe variable cap; 0: library default */
    uint64_t state_budget; /* certifier state cap; 0: library default */
} muc_options;

/* Fills every field with its default. */
MUC_API void muc_options_init(muc_options* opt);

typedef struct muc_run_stats {
    size_t n_mucs;
    int complete; /* nonzero when the whole core set was enumerated */
    uint64_t final_k;
    size_t muc_size_min;
    size_t muc_size_max;
    double muc_size_med;
    double gen_ms;  /* CPU time generating candidate cores */
    double cert_ms; /* CPU time certifying them */
    double wall_ms;
} muc_run_stats;

typedef enum muc_event_type {
    MUC_EVENT_MUC = 0,       /* certified minimal unsatisfiable core */
    MUC_EVENT_DEEPEN = 1,    /* probe depth restart from_k -> to_k */
    MUC_EVENT_DISPROVED = 2, /* candidate satisfiable beyond the probe depth */
    MUC_EVENT_STATS = 3,     /* final summary, always the last event */
    MUC_EVENT_ERROR = 4,     /* abnormal termination cause */
} muc_event_type;

typedef struct muc_event {
    muc_event_type type;
    /* MUC, DISPROVED: the conjunct indices (1-based, ascending).
     * DEEPEN: the disproved candidate that forced the restart. */
    const size_t* conjuncts;
    size_t n_conjuncts;
    uint64_t k;           /* MUC: certified depth; DISPROVED: probe depth */
    uint64_t from_k;      /* DEEPEN */
    uint64_t to_k;        /* DEEPEN */
    uint64_t witness_len; /* DISPROVED: length of the satisfying trace */
    double t_ms;          /* MUC: wall time since the run started */
    const char* message;  /* ERROR */
    const muc_run_stats* stats; /* STATS */
} muc_event;

/* Return 0 to continue the run, nonzero to abort it. */
typedef int (*muc_event_cb)(const muc_event* event, void* user);

/* Parses a specification.  With split_recursive nonzero the top-level
 * conjunction is flattened recursively into its atomsized conjuncts;
 * otherwise only the root connective is split.  A conjunct-per-line
 * variant: muc_spec_parse_lines, one formula per entry. */
MUC_API muc_status muc_spec_parse(const char* text, int split_recursive,
                                  muc_spec** out);
MUC_API muc_status muc_spec_parse_lines(const char* const* lines,
                                        size_t n_lines, muc_spec** out);
MUC_API void muc_spec_free(muc_spec* spec);

MUC_API size_t muc_spec_conjunct_count(const muc_spec* spec);
/* Printed form of conjunct `index` (1-based); NULL if out of range. */
MUC_API char* muc_spec_conjunct_text(const muc_spec* spec, size_t index);

/* Iterative-deepening enumeration of every minimal unsatisfiable core.
 * Events arrive in certification order; the STATS event is always last and
 * is mirrored into *stats_out when non-NULL.  cb may be NULL to just
 * collect stats. */
MUC_API muc_status muc_enumerate(muc_spec* spec, const muc_options* opt,
                                 muc_event_cb cb, void* user,
                                 muc_run_stats* stats_out);

/* Single fixed-depth pass: only cores certified at exactly depth k are
 * reported; candidates satisfiable beyond k surface as DISPROVED. */
MUC_API muc_status muc_enumerate_k(muc_spec* spec, uint64_t k,
                                   const muc_options* opt, muc_event_cb cb,
                                   void* user, muc_run_stats* stats_out);

/* First certified core only.  On success *n_out holds the core size and
 * *conjuncts_out a malloc'd index array (free with muc_indices_free);
 * when the specification is satisfiable, *n_out is 0 and *conjuncts_out
 * NULL.  *k_out receives the certified depth. */
MUC_API muc_status muc_find_one(muc_spec* spec, const muc_options* opt,
                                size_t** conjuncts_out, size_t* n_out,
                                uint64_t* k_out);

/* Finite-trace satisfiability of the whole conjunction: *min_length_out
 * receives the minimal model length, or 0 when unsatisfiable. */
MUC_API muc_status muc_check_sat(muc_spec* spec, const muc_options* opt,
                                 uint64_t* min_length_out);

/* Ground-fact export of the depth-k probe (k >= 1); NULL on error. */
MUC_API char* muc_export_asp(muc_spec* spec, uint64_t k);

/* Random conjunction instance: one formula per line.  NULL on error. */
MUC_API char* muc_generate(size_t n_conjuncts, size_t n_atoms,
                           size_t max_depth, uint64_t seed);

MUC_API void muc_string_free(char* s);
MUC_API void muc_indices_free(size_t* v);

/* Message for the most recent failure on this thread; never NULL. */
MUC_API const char* muc_last_error(void);

MUC_API const char* muc_version(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LTLFMUC_H */
