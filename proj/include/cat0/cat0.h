#ifndef CAT0_H
#define CAT0_H

#include <stddef.h>
#include <stdint.h>

#if defined(CAT0_BUILDING_LIBRARY)
#define CAT0_API __attribute__((visibility("default")))
#else
#define CAT0_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cat0_status {
  CAT0_OK = 0,
  CAT0_ERR_PARSE = 1,
  CAT0_ERR_COMPUTATION = 2,
  CAT0_ERR_INVALID = 3,
  CAT0_ERR_INTERNAL = 4
} cat0_status;

typedef struct cat0_space cat0_space;
typedef struct cat0_measure cat0_measure;
typedef struct cat0_graph cat0_graph;

CAT0_API const char* cat0_version(void);

/* Message for the last failing call on this thread; empty after success. */
CAT0_API const char* cat0_last_error(void);

/* Releases strings returned through char** out-parameters. */
CAT0_API void cat0_string_free(char* s);

CAT0_API cat0_status cat0_space_from_json(const char* json, cat0_space** out);
CAT0_API void cat0_space_free(cat0_space* space);
/* Points are JSON documents in the space's point format. */
CAT0_API cat0_status cat0_space_distance(const cat0_space* space, const char* p, const char* q, double* out);

CAT0_API cat0_status cat0_measure_from_json(const char* json, cat0_measure** out);
CAT0_API void cat0_measure_free(cat0_measure* mu);
CAT0_API cat0_status cat0_measure_barycenter(const cat0_measure* mu, double tol, uint64_t seed, char** point_json);
CAT0_API cat0_status cat0_measure_delta(const cat0_measure* mu, double gap_tol, double* value, double* lower_bound);

CAT0_API cat0_status cat0_graph_from_edge_list(const char* text, cat0_graph** out);
CAT0_API cat0_status cat0_graph_from_json(const char* json, cat0_graph** out);
CAT0_API void cat0_graph_free(cat0_graph* g);
CAT0_API cat0_status cat0_graph_size(const cat0_graph* g, size_t* vertices, size_t* edges);
CAT0_API cat0_status cat0_graph_lambda1(const cat0_graph* g, double* out);
/* Writes 0 when the graph is a forest. */
CAT0_API cat0_status cat0_graph_girth(const cat0_graph* g, int* out);

/* Runs a subcommand on a JSON request and writes a JSON report. On failure the
   report still holds an "error" object with code and message. */
CAT0_API cat0_status cat0_run(const char* command, const char* request_json, char** report_json);
CAT0_API cat0_status cat0_report_to_csv(const char* report_json, char** csv);

#ifdef __cplusplus
}
#endif

#endif
