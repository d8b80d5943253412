// Attribute-name -> taxonomy group map for panel layout (generated from
// the engine's schema, version 1). Grouping is presentation only; all
// displayed values come from API payloads. Unknown names fall back to
// "other" so a newer server never breaks rendering.

export type TaxonomyGroup = "machine" | "usage" | "context" | "other";

export const ATTRIBUTE_GROUPS: Record<string, TaxonomyGroup> = {
  dof: "machine",
  translation_dof: "machine",
  rotation_dof: "machine",
  sensed_dof: "machine",
  actuated_dof: "machine",
  grounded: "machine",
  kinematic_structure: "machine",
  base_type: "machine",
  workspace_width_mm: "machine",
  workspace_height_mm: "machine",
  workspace_depth_mm: "machine",
  workspace_volume_cm3: "machine",
  workspace_shape: "machine",
  max_force_n: "machine",
  continuous_force_n: "machine",
  max_torque_nm: "machine",
  force_resolution_n: "machine",
  position_resolution_mm: "machine",
  max_stiffness_n_per_mm: "machine",
  backdrive_friction_n: "machine",
  apparent_inertia_g: "machine",
  mass_kg: "machine",
  update_rate_hz: "machine",
  actuator_type: "machine",
  actuator_count: "machine",
  sensor_type: "machine",
  encoder_resolution_counts: "machine",
  transmission_type: "machine",
  end_effector: "machine",
  interchangeable_end_effector: "machine",
  gravity_compensation: "machine",
  backdrivable: "machine",
  control_paradigm: "machine",
  bimanual_capable: "machine",
  peak_velocity_mm_s: "machine",
  communication_interface: "machine",
  power_supply_v: "machine",
  safety_brake: "machine",
  footprint_cm2: "machine",
  mechanism_description: "machine",
  materials: "machine",
  body_part: "usage",
  grip_style: "usage",
  handedness: "usage",
  user_posture: "usage",
  portability: "usage",
  feedback_modality: "usage",
  tactile_feedback: "usage",
  intended_task: "usage",
  target_user: "usage",
  training_required: "usage",
  setup_time_min: "usage",
  multi_user: "usage",
  skill_level: "usage",
  operating_noise_db: "usage",
  maintenance_interval_months: "usage",
  accessibility_notes: "usage",
  typical_session_min: "usage",
  safety_certified: "usage",
  application_domain: "context",
  commercially_available: "context",
  price_usd: "context",
  release_year: "context",
  publication_venue: "context",
  open_source: "context",
  software_sdk: "context",
  os_support: "context",
  country_of_origin: "context",
  deployment_setting: "context",
  successor_of: "context",
  intended_market: "context",
};

export function groupOf(attribute: string): TaxonomyGroup {
  return ATTRIBUTE_GROUPS[attribute] ?? "other";
}
