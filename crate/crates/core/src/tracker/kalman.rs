use std::collections::VecDeque;

use nalgebra::{Matrix4, SMatrix, SVector, Vector4};

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

pub type StateVector = SVector<f64, 8>;
pub type StateCovariance = SMatrix<f64, 8, 8>;
pub type MeasurementMatrix = SMatrix<f64, 4, 8>;

/// Smallest width/height a track box may take after an update, px.
const MIN_SIZE: f64 = 1.0;

/// Box state `(x, y, w, h, vx, vy, vw, vh)`, velocities in px/frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackState {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub vx: f64,
    pub vy: f64,
    pub vw: f64,
    pub vh: f64,
}

impl TrackState {
    pub fn from_vector(v: &StateVector) -> Self {
        Self {
            x: v[0],
            y: v[1],
            w: v[2],
            h: v[3],
            vx: v[4],
            vy: v[5],
            vw: v[6],
            vh: v[7],
        }
    }

    pub fn to_vector(&self) -> StateVector {
        StateVector::from([
            self.x, self.y, self.w, self.h, self.vx, self.vy, self.vw, self.vh,
        ])
    }
}

/// Measured box `(x, y, w, h)` in center format.
pub type MeasurementVector = BoundingBox;

fn measurement(z: &MeasurementVector) -> Vector4<f64> {
    Vector4::new(z.cx, z.cy, z.w, z.h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KalmanModel {
    pub transition: StateCovariance,
    pub observation: MeasurementMatrix,
    pub process_noise: StateCovariance,
    pub initial_covariance: StateCovariance,
    pub initial_measurement_noise: Matrix4<f64>,
}

impl Default for KalmanModel {
    fn default() -> Self {
        Self::constant_velocity(
            [1.0, 1.0, 1.0, 1.0, 0.01, 0.01, 0.01, 0.01],
            [10.0, 10.0, 10.0, 10.0, 1000.0, 1000.0, 1000.0, 1000.0],
            10.0,
        )
    }
}

impl KalmanModel {
    /// Unit-step constant-velocity model with diagonal `Q`, `P0` and `R_init`.
    pub fn constant_velocity(q: [f64; 8], p0: [f64; 8], r_init: f64) -> Self {
        let mut transition = StateCovariance::identity();
        let mut observation = MeasurementMatrix::zeros();
        for i in 0..4 {
            transition[(i, i + 4)] = 1.0;
            observation[(i, i)] = 1.0;
        }
        Self {
            transition,
            observation,
            process_noise: StateCovariance::from_diagonal(&q.into()),
            initial_covariance: StateCovariance::from_diagonal(&p0.into()),
            initial_measurement_noise: Matrix4::from_diagonal_element(r_init),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrackStatus {
    Tentative,
    Confirmed,
    Coasting,
    Deleted,
}

impl TrackStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrackStatus::Tentative => "tentative",
            TrackStatus::Confirmed => "confirmed",
            TrackStatus::Coasting => "coasting",
            TrackStatus::Deleted => "deleted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub id: u64,
    pub state: StateVector,
    pub covariance: StateCovariance,
    pub residuals: VecDeque<[f64; 4]>,
    pub window_len: usize,
    pub hits: u32,
    pub age: u32,
    pub time_since_update: u32,
    pub status: TrackStatus,
    /// Box predicted for the current frame, before any update.
    pub prediction: Option<BoundingBox>,
}

impl Track {
    pub fn new(id: u64, z: &MeasurementVector, model: &KalmanModel, window_len: usize) -> Self {
        let mut state = StateVector::zeros();
        state.fixed_rows_mut::<4>(0).copy_from(&measurement(z));
        Self {
            id,
            state,
            covariance: model.initial_covariance,
            residuals: VecDeque::with_capacity(window_len),
            window_len,
            hits: 1,
            age: 0,
            time_since_update: 0,
            status: TrackStatus::Tentative,
            prediction: None,
        }
    }

    pub fn track_state(&self) -> TrackState {
        TrackState::from_vector(&self.state)
    }

    /// Current `(x, y, w, h)` as a box; sizes are clamped to stay valid.
    pub fn bbox(&self) -> BoundingBox {
        BoundingBox::new(
            self.state[0],
            self.state[1],
            self.state[2].max(MIN_SIZE),
            self.state[3].max(MIN_SIZE),
        )
    }

    pub fn predict(&mut self, model: &KalmanModel) {
        let f = &model.transition;
        self.state = f * self.state;
        self.covariance = symmetrize(f * self.covariance * f.transpose() + model.process_noise);
        self.age += 1;
        self.time_since_update += 1;
        self.prediction = Some(self.bbox());
    }

    /// Innovation `z - H x_pred`, ordered `(dx, dy, dw, dh)`.
    pub fn innovation(&self, z: &MeasurementVector, model: &KalmanModel) -> [f64; 4] {
        let d = measurement(z) - model.observation * self.state;
        [d[0], d[1], d[2], d[3]]
    }

    /// Kalman update with the supplied measurement noise `r`.
    ///
    /// The innovation joins the residual window, evicting the oldest entry
    /// once the window is full.
    pub fn update(
        &mut self,
        z: &MeasurementVector,
        r: &Matrix4<f64>,
        model: &KalmanModel,
    ) -> Result<()> {
        let h = &model.observation;
        let innovation = measurement(z) - h * self.state;
        let s = h * self.covariance * h.transpose() + r;
        let s_inv = s.try_inverse().ok_or_else(|| {
            Error::Singular(format!("innovation covariance of track {}", self.id))
        })?;
        let gain = self.covariance * h.transpose() * s_inv;
        self.state += gain * innovation;
        // Joseph form keeps the covariance PSD.
        let i_kh = StateCovariance::identity() - gain * h;
        self.covariance = symmetrize(
            i_kh * self.covariance * i_kh.transpose() + gain * r * gain.transpose(),
        );
        self.state[2] = self.state[2].max(MIN_SIZE);
        self.state[3] = self.state[3].max(MIN_SIZE);

        if self.residuals.len() == self.window_len {
            self.residuals.pop_front();
        }
        self.residuals
            .push_back([innovation[0], innovation[1], innovation[2], innovation[3]]);
        self.hits += 1;
        self.time_since_update = 0;
        Ok(())
    }
}

fn symmetrize(m: StateCovariance) -> StateCovariance {
    (m + m.transpose()) * 0.5
}
