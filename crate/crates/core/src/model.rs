//! Assembled reflector + reflectarray system with precomputed incident
//! fields and reflector currents.

use num_complex::Complex64;

use crate::efficiency;
use crate::farfield::{self, CurrentElement, Direction, SourceSet};
use crate::feed::{self, FeedConfig, FeedModel};
use crate::geometry::{self, DishConfig, Polarization, SurfaceSample, UnitCell};
use crate::parallel;
use crate::scattering::{self, DyadSource, PolarizationBasis, ReflectionDyad, SwitchState};
use crate::vector::CVec3;
use crate::{Error, Result};

/// Numerical options shared by every model built for a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOptions {
    pub samples_per_wavelength: f64,
    pub feed_model: FeedModel,
    pub feed_amplitude: Complex64,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            samples_per_wavelength: 4.0,
            feed_model: FeedModel::Projected,
            feed_amplitude: Complex64::new(1.0, 0.0),
        }
    }
}

/// Incident field and polarization basis at one annulus subsample.
#[derive(Debug, Clone, Copy)]
struct Illumination {
    basis: PolarizationBasis,
    field: CVec3,
}

/// Dyad applied to each reflectarray cell, in tessellation order.
pub type CellAssignment = Vec<ReflectionDyad>;

pub struct ImsModel {
    dish: DishConfig,
    feed: FeedConfig,
    dyads: DyadSource,
    options: ModelOptions,
    reflector: Vec<SurfaceSample>,
    reflector_incident: Vec<CVec3>,
    reflector_sources: SourceSet,
    cells: Vec<UnitCell>,
    cell_illumination: Vec<Vec<Illumination>>,
    p_rad: f64,
}

impl ImsModel {
    pub fn build(dish: DishConfig, dyads: DyadSource, options: ModelOptions) -> Result<Self> {
        let feed = FeedConfig::for_dish(&dish)
            .with_model(options.feed_model)
            .with_amplitude(options.feed_amplitude);
        let reflector = geometry::mesh_reflector(&dish, options.samples_per_wavelength)?;
        let reflector_incident = parallel::map(&reflector, |s| feed::incident_field(&feed, s))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let pec = ReflectionDyad::pec();
        let elements = reflector
            .iter()
            .zip(&reflector_incident)
            .map(|(s, e)| {
                let j = scattering::surface_current(s, &pec, *e)?;
                Ok(CurrentElement {
                    position: s.position,
                    moment: j * s.area,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let cells = geometry::tessellate_annulus(&dish);
        let cell_illumination = cells
            .iter()
            .map(|c| {
                c.subsamples
                    .iter()
                    .map(|s| {
                        Ok(Illumination {
                            basis: scattering::local_polarization_basis(s),
                            field: feed::incident_field(&feed, s)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        let p_rad = feed::feed_power(&feed, dish.rim_angle());
        Ok(ImsModel {
            reflector_sources: SourceSet {
                wavenumber: dish.wavenumber(),
                elements,
            },
            dish,
            feed,
            dyads,
            options,
            reflector,
            reflector_incident,
            cells,
            cell_illumination,
            p_rad,
        })
    }

    /// Solid PEC dish of the full diameter with the same options.
    pub fn reference(dish: &DishConfig, options: ModelOptions) -> Result<Self> {
        ImsModel::build(dish.solid(), DyadSource::Pec, options)
    }

    pub fn dish(&self) -> &DishConfig {
        &self.dish
    }
    pub fn feed(&self) -> &FeedConfig {
        &self.feed
    }
    pub fn dyads(&self) -> &DyadSource {
        &self.dyads
    }
    pub fn options(&self) -> &ModelOptions {
        &self.options
    }
    pub fn polarization(&self) -> Polarization {
        self.dish.polarization()
    }
    pub fn reflector(&self) -> &[SurfaceSample] {
        &self.reflector
    }
    pub fn reflector_incident(&self) -> &[CVec3] {
        &self.reflector_incident
    }
    pub fn reflector_sources(&self) -> &SourceSet {
        &self.reflector_sources
    }
    pub fn cells(&self) -> &[UnitCell] {
        &self.cells
    }
    /// Intercepted feed power used to normalize directivity.
    pub fn p_rad(&self) -> f64 {
        self.p_rad
    }

    pub fn cell_dyad(&self, cell: usize, state: SwitchState) -> Result<ReflectionDyad> {
        let c = self.cell(cell)?;
        self.dyads.lookup(state, c.theta_li, self.dish.frequency())
    }

    fn cell(&self, cell: usize) -> Result<&UnitCell> {
        self.cells
            .get(cell)
            .ok_or_else(|| Error::Contract(format!("cell index {cell} out of range ({} cells)", self.cells.len())))
    }

    /// Current elements of one cell under `dyad`.
    pub fn cell_elements(&self, cell: usize, dyad: &ReflectionDyad) -> Result<Vec<CurrentElement>> {
        let c = self.cell(cell)?;
        c.subsamples
            .iter()
            .zip(&self.cell_illumination[cell])
            .map(|(s, ill)| {
                let j = scattering::current_with_basis(s.normal(), &ill.basis, dyad, ill.field)?;
                Ok(CurrentElement {
                    position: s.position,
                    moment: j * s.area,
                })
            })
            .collect()
    }

    /// Co-polar far field of one cell under `dyad`.
    pub fn cell_field(&self, cell: usize, dyad: &ReflectionDyad, dir: Direction) -> Result<Complex64> {
        let sources = SourceSet {
            wavenumber: self.dish.wavenumber(),
            elements: self.cell_elements(cell, dyad)?,
        };
        let e = farfield::radiate_sequential(&sources, dir)?;
        Ok(farfield::co_cross(e, dir, self.polarization()).0)
    }

    /// Co-polar far field of the reflector portion alone.
    pub fn reflector_field(&self, dir: Direction) -> Result<Complex64> {
        if self.reflector_sources.elements.is_empty() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let e = farfield::radiate(&self.reflector_sources, dir)?;
        Ok(farfield::co_cross(e, dir, self.polarization()).0)
    }

    /// Every radiating element: reflector followed by the annulus cells.
    pub fn sources(&self, assignment: &[ReflectionDyad]) -> Result<SourceSet> {
        self.check_assignment(assignment)?;
        let mut elements = self.reflector_sources.elements.clone();
        let per_cell = parallel::map(&(0..self.cells.len()).collect::<Vec<_>>(), |&i| {
            self.cell_elements(i, &assignment[i])
        });
        for cell in per_cell {
            elements.extend(cell?);
        }
        Ok(SourceSet {
            wavenumber: self.dish.wavenumber(),
            elements,
        })
    }

    /// Power ratio after/before reflection over every surface sample,
    /// reflector samples using `-I`.
    pub fn radiation_efficiency(&self, assignment: &[ReflectionDyad]) -> Result<f64> {
        self.check_assignment(assignment)?;
        let pec = ReflectionDyad::pec();
        let reflector = self.reflector.iter().zip(&self.reflector_incident).map(|(s, e)| {
            let basis = scattering::local_polarization_basis(s);
            (s.area, pec, basis.decompose(*e))
        });
        let annulus = self.cells.iter().enumerate().flat_map(|(i, c)| {
            let dyad = assignment[i];
            c.subsamples
                .iter()
                .zip(&self.cell_illumination[i])
                .map(move |(s, ill)| (s.area, dyad, ill.basis.decompose(ill.field)))
        });
        efficiency::radiation_efficiency(reflector.chain(annulus))
    }

    fn check_assignment(&self, assignment: &[ReflectionDyad]) -> Result<()> {
        if assignment.len() != self.cells.len() {
            return Err(Error::Contract(format!(
                "assignment has {} dyads for {} cells",
                assignment.len(),
                self.cells.len()
            )));
        }
        Ok(())
    }

    /// Assignment giving every cell the same dyad.
    pub fn uniform_assignment(&self, dyad: ReflectionDyad) -> CellAssignment {
        vec![dyad; self.cells.len()]
    }
}
