#ifndef CGAMOTION_H
#define CGAMOTION_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Number of coefficients in a multivector.
 */
#define CGM_BLADES 32

/*
 Result of every fallible call. Engine codes match the CLI exit codes.
 */
typedef enum CgmStatus {
  CGM_STATUS_OK = 0,
  CGM_STATUS_CONFIG = 3,
  CGM_STATUS_IO = 4,
  CGM_STATUS_FORMAT = 5,
  CGM_STATUS_ALGEBRA = 10,
  CGM_STATUS_SKINNING = 11,
  CGM_STATUS_CODEC = 12,
  CGM_STATUS_NET = 13,
  CGM_STATUS_SOFTBODY = 14,
  CGM_STATUS_ROPE = 15,
  CGM_STATUS_NULL_POINTER = 20,
  CGM_STATUS_INVALID_ARGUMENT = 21,
  CGM_STATUS_BUFFER_TOO_SMALL = 22,
  CGM_STATUS_PANIC = 23,
} CgmStatus;

/*
 Versor classes reported by [`cgm_classify_versor`].
 */
typedef enum CgmVersorKind {
  CGM_VERSOR_KIND_POINT = 0,
  CGM_VERSOR_KIND_TRANSLATOR = 1,
  CGM_VERSOR_KIND_ROTOR = 2,
  CGM_VERSOR_KIND_DILATOR = 3,
  CGM_VERSOR_KIND_MOTOR = 4,
} CgmVersorKind;

/*
 Soft body handle.
 */
typedef struct CgmBody CgmBody;

/*
 Reduced keyframe track handle.
 */
typedef struct CgmKeys CgmKeys;

/*
 Skinned model handle.
 */
typedef struct CgmModel CgmModel;

/*
 Rope handle.
 */
typedef struct CgmRope CgmRope;

/*
 Pose track handle.
 */
typedef struct CgmTrack CgmTrack;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or NULL after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *cgm_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *cgm_version(void);

/*
 `out = a b`.

 # Safety
 `a`, `b` and `out` point to 32 doubles each.
 */
enum CgmStatus cgm_geometric_product(const double *a, const double *b, double *out);

/*
 Conformal embedding of a Euclidean point.

 # Safety
 `point` points to 3 doubles, `out` to 32.
 */
enum CgmStatus cgm_up(const double *point, double *out);

/*
 Euclidean point of a conformal point.

 # Safety
 `c` points to 32 doubles, `out` to 3.
 */
enum CgmStatus cgm_down(const double *c, double *out);

/*
 Motor that rotates by the unit quaternion `(w, x, y, z)` and then
 translates by `t`.

 # Safety
 `quaternion` points to 4 doubles, `translation` to 3, `out` to 32.
 */
enum CgmStatus cgm_motor(const double *quaternion, const double *translation, double *out);

/*
 `out = v x ~v`.

 # Safety
 `versor`, `x` and `out` point to 32 doubles each.
 */
enum CgmStatus cgm_apply_versor(const double *versor, const double *x, double *out);

/*
 Blend of two versors of the same kind at `t` in [0, 1]; the result keeps
 the kind.

 # Safety
 `a`, `b` and `out` point to 32 doubles each.
 */
enum CgmStatus cgm_interpolate_versor(const double *a, const double *b, double t, double *out);

/*
 # Safety
 `m` points to 32 doubles; `kind` is writable.
 */
enum CgmStatus cgm_classify_versor(const double *m, enum CgmVersorKind *kind);

/*
 Loads a model file.

 # Safety
 `path` is a NUL-terminated string; `out` is writable.
 */
enum CgmStatus cgm_model_load(const char *path, struct CgmModel **out);

/*
 # Safety
 `model` is NULL or a handle from [`cgm_model_load`] not yet freed.
 */
void cgm_model_free(struct CgmModel *model);

/*
 Vertex count, or 0 for NULL.

 # Safety
 `model` is NULL or a live handle.
 */
size_t cgm_model_vertex_count(const struct CgmModel *model);

/*
 Bone count, or 0 for NULL.

 # Safety
 `model` is NULL or a live handle.
 */
size_t cgm_model_bone_count(const struct CgmModel *model);

/*
 Skins the model in a pose of `bones` model-space motors (32 doubles
 each) and writes 3 doubles per vertex.

 # Safety
 `motors` holds `bones * 32` doubles; `out` has room for `capacity` doubles.
 */
enum CgmStatus cgm_skin(const struct CgmModel *model,
                        const double *motors,
                        size_t bones,
                        double *out,
                        size_t capacity);

/*
 Loads a track file.

 # Safety
 `path` is a NUL-terminated string; `out` is writable.
 */
enum CgmStatus cgm_track_load(const char *path, struct CgmTrack **out);

/*
 # Safety
 `track` is NULL or a handle from [`cgm_track_load`] not yet freed.
 */
void cgm_track_free(struct CgmTrack *track);

/*
 Frame count, or 0 for NULL.

 # Safety
 `track` is NULL or a live handle.
 */
size_t cgm_track_frame_count(const struct CgmTrack *track);

/*
 Bone count, or 0 for NULL.

 # Safety
 `track` is NULL or a live handle.
 */
size_t cgm_track_bone_count(const struct CgmTrack *track);

/*
 Copies frame `frame` as `bones * 32` doubles.

 # Safety
 `out` has room for `capacity` doubles.
 */
enum CgmStatus cgm_track_frame(const struct CgmTrack *track,
                               size_t frame,
                               double *out,
                               size_t capacity);

/*
 Reduces a track to keyframes with max skinned-vertex error `epsilon`.

 # Safety
 `track` and `model` are live handles; `out` is writable.
 */
enum CgmStatus cgm_keys_reduce(const struct CgmTrack *track,
                               const struct CgmModel *model,
                               double epsilon,
                               struct CgmKeys **out);

/*
 # Safety
 `keys` is NULL or a handle from [`cgm_keys_reduce`] not yet freed.
 */
void cgm_keys_free(struct CgmKeys *keys);

/*
 Total keys over all bones, or 0 for NULL.

 # Safety
 `keys` is NULL or a live handle.
 */
size_t cgm_keys_count(const struct CgmKeys *keys);

/*
 Reconstructed pose at source frame `frame`.

 # Safety
 `out` has room for `capacity` doubles.
 */
enum CgmStatus cgm_keys_sample(const struct CgmKeys *keys,
                               size_t frame,
                               double *out,
                               size_t capacity);

/*
 Encodes a pose as a SNAPSHOT message. `written` receives the message
 length; when `capacity` is too small nothing is copied and the status is
 `BufferTooSmall` with `written` set to the required length.

 # Safety
 `motors` holds `bones * 32` doubles; `out` has room for `capacity` bytes.
 */
enum CgmStatus cgm_encode_snapshot(const double *motors,
                                   size_t bones,
                                   uint32_t seq,
                                   uint32_t timestamp_ms,
                                   uint8_t *out,
                                   size_t capacity,
                                   size_t *written);

/*
 Decodes a SNAPSHOT message into `bones * 32` doubles; `bones` receives
 the bone count.

 # Safety
 `bytes` holds `len` bytes; `out` has room for `capacity` doubles.
 */
enum CgmStatus cgm_decode_snapshot(const uint8_t *bytes,
                                   size_t len,
                                   double *out,
                                   size_t capacity,
                                   size_t *bones);

/*
 Loads a soft-body file.

 # Safety
 `path` is a NUL-terminated string; `out` is writable.
 */
enum CgmStatus cgm_body_load(const char *path, struct CgmBody **out);

/*
 # Safety
 `body` is NULL or a handle from [`cgm_body_load`] not yet freed.
 */
void cgm_body_free(struct CgmBody *body);

/*
 Particle count, or 0 for NULL.

 # Safety
 `body` is NULL or a live handle.
 */
size_t cgm_body_particle_count(const struct CgmBody *body);

/*
 One step of `dt` seconds under `gravity`.

 # Safety
 `gravity` points to 3 doubles.
 */
enum CgmStatus cgm_body_step(struct CgmBody *body, double dt, const double *gravity);

/*
 Drives the body centre toward `target` with servo `strength` (1/s).

 # Safety
 `target` points to 3 doubles.
 */
enum CgmStatus cgm_body_set_center_target(struct CgmBody *body,
                                          const double *target,
                                          double strength);

/*
 Writes 3 doubles per particle.

 # Safety
 `out` has room for `capacity` doubles.
 */
enum CgmStatus cgm_body_positions(const struct CgmBody *body, double *out, size_t capacity);

/*
 `½ Σ m |goal - x|²` at the current positions.

 # Safety
 `energy` is writable.
 */
enum CgmStatus cgm_body_deformation_energy(const struct CgmBody *body, double *energy);

/*
 Loads a rope file.

 # Safety
 `path` is a NUL-terminated string; `out` is writable.
 */
enum CgmStatus cgm_rope_load(const char *path, struct CgmRope **out);

/*
 Straight rope of `nodes` nodes from `start` along `direction`.

 # Safety
 `start` and `direction` point to 3 doubles; `out` is writable.
 */
enum CgmStatus cgm_rope_straight(const double *start,
                                 const double *direction,
                                 size_t nodes,
                                 double rest_length,
                                 double radius,
                                 struct CgmRope **out);

/*
 # Safety
 `rope` is NULL or a handle from a `cgm_rope_*` constructor not yet freed.
 */
void cgm_rope_free(struct CgmRope *rope);

/*
 Node count, or 0 for NULL.

 # Safety
 `rope` is NULL or a live handle.
 */
size_t cgm_rope_node_count(const struct CgmRope *rope);

/*
 # Safety
 `rope` is a live handle.
 */
enum CgmStatus cgm_rope_set_pinned(struct CgmRope *rope, size_t node, bool pinned);

/*
 Moves a pinned node to `position` over the next step.

 # Safety
 `position` points to 3 doubles.
 */
enum CgmStatus cgm_rope_drive(struct CgmRope *rope, size_t node, const double *position);

/*
 One step of `dt` seconds under `gravity`, no obstacles.

 # Safety
 `gravity` points to 3 doubles.
 */
enum CgmStatus cgm_rope_step(struct CgmRope *rope, double dt, const double *gravity);

/*
 Writes 3 doubles per node.

 # Safety
 `out` has room for `capacity` doubles.
 */
enum CgmStatus cgm_rope_positions(const struct CgmRope *rope, double *out, size_t capacity);

/*
 Largest relative segment stretch.

 # Safety
 `strain` is writable.
 */
enum CgmStatus cgm_rope_max_strain(const struct CgmRope *rope, double *strain);

/*
 Closest approach of non-adjacent segments; infinity when the rope is too
 short to have such a pair.

 # Safety
 `distance` is writable.
 */
enum CgmStatus cgm_rope_min_segment_distance(const struct CgmRope *rope, double *distance);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CGAMOTION_H */
