from polyfuse.synth.scene import (
    MaterialKind, Material, Texture, Patch, Light, NoiseModel, SyntheticRig, PalShading,
    SceneSpec, demo_scene
)
from polyfuse.synth.render import (
    Hits, GroundTruth, SceneRender, cast_rays, render_stereo, render_mosaic, render_annulus,
    render_scene
)
